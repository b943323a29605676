#include "polqpt/process_gen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace polqpt;
using testing_support::to_m2;

std::vector<std::vector<std::array<double, 4>>> as_grid(const FourierField& series) {
    std::vector<std::vector<std::array<double, 4>>> c(series.omega_x + 1,
                                                      std::vector<std::array<double, 4>>(series.omega_y + 1));
    for (int i = 0; i <= series.omega_x; ++i)
        for (int j = 0; j <= series.omega_y; ++j) c[i][j] = series.coefficients[i * (series.omega_y + 1) + j];
    return c;
}

TEST(FourierField, ZeroCoefficientsGiveZeroField) {
    const auto field = sample_fourier_field(FourierField::zero(8, 3, 2));
    for (double v : field) EXPECT_EQ(v, 0.0);
}

TEST(FourierField, ConstantTerm) {
    auto series = FourierField::zero(8, 2, 2);
    series.coefficient(0, 0)[0] = 1.0;
    for (double v : sample_fourier_field(series)) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(FourierField, SineSineTermVanishesOnAxes) {
    const std::size_t n = 16;
    auto series = FourierField::zero(n, 1, 1);
    series.coefficient(1, 1)[3] = 1.0;
    const auto field = sample_fourier_field(series);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col < n; ++col) {
            const double expected = std::sin(2 * kPi * col / n) * std::sin(2 * kPi * row / n);
            EXPECT_NEAR(field[row * n + col], expected, 1e-15);
            if (row == 0 || col == 0) {
                EXPECT_NEAR(field[row * n + col], 0.0, 1e-15);
            }
        }
    }
}

TEST(FourierField, MatchesNaiveSeriesAtArbitraryPoints) {
    Rng rng(41);
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> coord(-5.0, 25.0);
    for (int t = 0; t < 50; ++t) {
        const auto series = FourierField::random(16, 5, rng);
        series.validate();
        const auto grid = as_grid(series);
        for (int s = 0; s < 20; ++s) {
            const double x = coord(gen), y = coord(gen);
            ASSERT_NEAR(series.evaluate(x, y), oracle::fourier_series(grid, x, y, 16), 1e-12);
        }
    }
}

TEST(FourierField, RotatedSamplingEvaluatesRotatedCoordinates) {
    Rng rng(43);
    const std::size_t n = 12;
    const auto series = FourierField::random(n, 4, rng);
    const double xi = 0.07;
    const auto field = sample_fourier_field(series, xi);
    const double c = (n - 1) / 2.0;
    const auto grid = as_grid(series);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col < n; ++col) {
            const double dx = col - c, dy = row - c;
            const double x = std::cos(xi) * dx - std::sin(xi) * dy + c;
            const double y = std::sin(xi) * dx + std::cos(xi) * dy + c;
            ASSERT_NEAR(field[row * n + col], oracle::fourier_series(grid, x, y, n), 1e-12);
        }
    }
}

TEST(FourierField, ValidateRejectsOutOfRange) {
    auto series = FourierField::zero(8, 1, 1);
    series.coefficient(1, 0)[2] = 1.5;
    EXPECT_THROW(series.validate(), std::invalid_argument);
    EXPECT_THROW(FourierField::zero(8, 6, 0).validate(), std::invalid_argument);
    EXPECT_THROW(FourierField::zero(8, 4, 0).validate(3), std::invalid_argument);
}

TEST(RotateFrame, Examples) {
    auto [x0, y0] = rotate_frame(0.3, -1.2, 0.0);
    EXPECT_DOUBLE_EQ(x0, 0.3);
    EXPECT_DOUBLE_EQ(y0, -1.2);
    auto [x1, y1] = rotate_frame(1.0, 0.0, kPi / 2);
    EXPECT_NEAR(x1, 0.0, 1e-15);
    EXPECT_NEAR(y1, 1.0, 1e-15);
    auto [x2, y2] = rotate_frame(1.0, 0.0, 5.0 * kPi / 180.0);
    EXPECT_NEAR(x2, 0.99619, 5e-6);
    EXPECT_NEAR(y2, 0.08716, 5e-6);
}

TEST(RandomProcess, DeterministicCanonicalAndValid) {
    GeneratorConfig cfg;
    cfg.n_pixels = 16;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const ProcessMap a = random_process(cfg, seed);
        const ProcessMap b = random_process(cfg, seed);
        ASSERT_EQ(a.params(), b.params());
        ASSERT_TRUE(a.canonicalized());
        ASSERT_TRUE(a.is_valid());
        ASSERT_GE(a[0].axis.z, 0.0);
        for (const auto& p : a.params()) {
            ASSERT_GE(p.theta, 0.0);
            ASSERT_LE(p.theta, kPi);
        }
    }
    EXPECT_NE(random_process(cfg, 1).params(), random_process(cfg, 2).params());
}

TEST(RandomProcess, RescalesThetaOntoFullRange) {
    GeneratorConfig cfg;
    cfg.n_pixels = 16;
    cfg.xi_max = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const RawProcessFields raw = draw_process_fields(cfg, seed);
        auto theta = raw.samples[0];
        rescale_min_max(theta, 0.0, kPi);
        const auto [mn, mx] = std::minmax_element(theta.begin(), theta.end());
        const bool flat = std::abs(*mx - *mn) < 1e-12;
        if (flat) {
            EXPECT_DOUBLE_EQ(*mn, kPi / 2);
        } else {
            EXPECT_DOUBLE_EQ(*mn, 0.0);
            EXPECT_DOUBLE_EQ(*mx, kPi);
        }
    }
}

TEST(RandomProcess, AllZeroFieldsAreRejected) {
    RawProcessFields raw;
    for (auto& series : raw.series) series = FourierField::zero(4, 0, 0);
    for (std::size_t m = 0; m < 4; ++m) raw.samples[m] = sample_fourier_field(raw.series[m]);
    EXPECT_FALSE(process_from_fields(raw, 4).has_value());
}

TEST(RescaleMinMax, ConstantFieldMapsToMidpoint) {
    std::vector<double> v(5, 3.25);
    rescale_min_max(v, -1.0, 1.0);
    for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(RandomProcess, RawFieldsAreBandLimited) {
    GeneratorConfig cfg;
    cfg.n_pixels = 32;
    cfg.xi_max = 0.0;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const RawProcessFields raw = draw_process_fields(cfg, seed);
        for (const auto& field : raw.samples) {
            double total = 0.0;
            for (double v : field) total += v * v;
            const double above = oracle::dft_energy_above(field, cfg.n_pixels, 5);
            ASSERT_LE(above, 1e-20 * std::max(1.0, total * cfg.n_pixels * cfg.n_pixels));
        }
    }
}

TEST(RandomProcess, FrameAngleWithinBound) {
    GeneratorConfig cfg;
    cfg.n_pixels = 8;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const double xi = draw_process_fields(cfg, seed).xi;
        ASSERT_LE(std::abs(xi), cfg.xi_max);
    }
}

TEST(PlateProcess, UniformQuarterWaveIsW) {
    const std::vector<Plate> plates{Plate::uniform(kPi / 2, 0.0)};
    const ProcessMap m = plate_process(plates, 4);
    const SU2Matrix w{Complex{1 / std::sqrt(2.0)}, Complex{0, 1 / std::sqrt(2.0)}, Complex{0, 1 / std::sqrt(2.0)},
                      Complex{1 / std::sqrt(2.0)}};
    for (std::size_t k = 0; k < m.pixel_count(); ++k) EXPECT_LT(max_abs_diff(m.gate(k), w), 1e-12);
}

TEST(PlateProcess, GratingStacksMatchDirectProductUpToGlobalSign) {
    const double lambda = 1.0;
    const std::size_t n = 24;
    const Window window = Window::square(lambda);
    for (const auto& plates : {three_plate_grating_stack(lambda), six_plate_grating_stack(lambda)}) {
        const ProcessMap m = plate_process(plates, n, window);
        double sign = 0.0;
        for (std::size_t row = 0; row < n; ++row) {
            for (std::size_t col = 0; col < n; ++col) {
                const double x = -lambda + (col + 0.5) * 2 * lambda / n;
                const double y = -lambda + (row + 0.5) * 2 * lambda / n;
                oracle::M2 u = oracle::identity();
                for (const auto& p : plates) {
                    const double alpha = p.kind == PlateKind::g_plate_x   ? kPi * x / p.lambda
                                         : p.kind == PlateKind::g_plate_y ? kPi * y / p.lambda
                                                                          : p.alpha0;
                    u = oracle::mul(oracle::retarder(p.delta, alpha), u);
                }
                const auto got = to_m2(m.gate(row * n + col));
                const double plus = oracle::max_diff(got, u);
                const double minus = oracle::max_diff(got, oracle::scale(u, -1.0));
                ASSERT_LT(std::min(plus, minus), 1e-12);
                if (sign == 0.0) sign = plus < minus ? 1.0 : -1.0;
                ASSERT_LT(sign > 0 ? plus : minus, 1e-12) << "global sign must be shared";
            }
        }
    }
}

TEST(PlateProcess, QPlateHasEquatorialAxisFollowingAzimuth) {
    const std::size_t n = 32;
    const std::vector<Plate> plates{Plate::q_plate(kPi, 0.5)};
    const Window window = Window::square(1.0);
    const ProcessMap m = plate_process(plates, n, window);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col < n; ++col) {
            const auto& p = m.at(row, col);
            const double phi = std::atan2(window.y_at(row, n), window.x_at(col, n));
            EXPECT_NEAR(p.axis.z, 0.0, 1e-12);
            EXPECT_NEAR(p.theta, kPi / 2, 1e-12);
            EXPECT_NEAR(std::abs(p.axis.x * std::cos(phi) + p.axis.y * std::sin(phi)), 1.0, 1e-12);
        }
    }
}

TEST(PlateProcess, QPlateWindsAroundCenter) {
    const std::size_t n = 16;
    const std::vector<Plate> plates{Plate::q_plate(kPi, 0.5)};
    const ProcessMap m = plate_process(plates, n, Window::square(1.0));
    std::vector<double> azimuths;
    for (auto [r, c] : {std::pair{7, 7}, {7, 8}, {8, 7}, {8, 8}}) {
        azimuths.push_back(spherical_from_axis(m.at(r, c).axis).azimuth);
    }
    const auto [mn, mx] = std::minmax_element(azimuths.begin(), azimuths.end());
    EXPECT_GT(*mx - *mn, kPi);
}

TEST(PlateProcess, GratingIsPeriodicInTwoLambda) {
    const double lambda = 0.5;
    const std::size_t n = 32;  // window [-2L, 2L]: 16 pixels per 2L
    const std::vector<Plate> plates{Plate::grating_x(1.3, lambda)};
    const ProcessMap m = plate_process(plates, n);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col + 16 < n; ++col) {
            ASSERT_LT(max_abs_diff(m.gate(row * n + col), m.gate(row * n + col + 16)), 1e-12);
        }
    }
}

TEST(PlateProcess, RejectsEmptyStackAndBadPeriod) {
    EXPECT_THROW((void)plate_process(std::vector<Plate>{}, 4), std::invalid_argument);
    const std::vector<Plate> bad{Plate::grating_x(1.0, 0.0)};
    EXPECT_THROW((void)plate_process(bad, 4), std::invalid_argument);
}

TEST(SinglePlateRandom, SinglePlateHasZeroNzBeforeCanonicalization) {
    Rng rng(47);
    for (int t = 0; t < 10; ++t) {
        std::vector<PatternedPlate> one{{rng.uniform(0.0, kTwoPi), FourierField::random(8, 3, rng)}};
        const ProcessMap m = patterned_plate_process(one, 8);
        for (const auto& p : m.params()) ASSERT_NEAR(p.axis.z, 0.0, 1e-12);
    }
}

TEST(SinglePlateRandom, TwoPlatesGenerallyHaveNonZeroNz) {
    const std::vector<PatternedPlate> two{{1.1, FourierField::zero(8, 0, 0)}, {2.0, FourierField::zero(8, 0, 0)}};
    auto plates = two;
    plates[1].alpha.coefficient(0, 0)[0] = 0.6;  // alpha_2 != alpha_1
    const ProcessMap m = patterned_plate_process(plates, 8);
    EXPECT_GT(std::abs(m[0].axis.z), 0.1);
}

TEST(SinglePlateRandom, DeterministicAndWithinRanges) {
    std::set<std::size_t> counts;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto plates = draw_patterned_plates(seed, 8);
        counts.insert(plates.size());
        ASSERT_GE(plates.size(), 1u);
        ASSERT_LE(plates.size(), 2u);
        for (const auto& p : plates) {
            ASSERT_GE(p.delta, 0.0);
            ASSERT_LT(p.delta, kTwoPi);
            ASSERT_NO_THROW(p.alpha.validate(3));
        }
        const ProcessMap a = single_plate_random(seed, 8);
        ASSERT_EQ(a.params(), single_plate_random(seed, 8).params());
        ASSERT_TRUE(a.canonicalized());
        ASSERT_GE(a[0].axis.z, 0.0);
    }
    EXPECT_EQ(counts.size(), 2u);
}

}  // namespace
