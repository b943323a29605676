#include "polqpt/process_map.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace polqpt;

ProcessMap random_map(std::mt19937_64& gen, std::size_t n) {
    std::vector<AxisAngle> params(n * n);
    for (auto& p : params) p = testing_support::random_axis_angle(gen);
    return ProcessMap(n, std::move(params));
}

// Independent fidelity oracles on explicit matrices.
double oracle_map_fidelity(const ProcessMap& a, const ProcessMap& b) {
    oracle::C sum{0.0};
    for (std::size_t k = 0; k < a.pixel_count(); ++k) {
        const auto ua = oracle::rotation(a[k].theta, testing_support::arr(a[k].axis));
        const auto ub = oracle::rotation(b[k].theta, testing_support::arr(b[k].axis));
        const auto p = oracle::mul(oracle::dagger(ua), ub);
        sum += p[0][0] + p[1][1];
    }
    return std::abs(sum) / (2.0 * static_cast<double>(a.pixel_count()));
}

TEST(ProcessMap, RejectsMalformedInput) {
    EXPECT_THROW(ProcessMap(0), std::invalid_argument);
    EXPECT_THROW(ProcessMap(2, std::vector<AxisAngle>(3)), std::invalid_argument);
    std::vector<AxisAngle> bad(4);
    bad[3].axis = {1, 1, 0};
    EXPECT_THROW(ProcessMap(2, bad), std::invalid_argument);
    std::vector<AxisAngle> negative_first(4);
    negative_first[0] = {0.5, {0, 0, -1}};
    EXPECT_THROW(ProcessMap(2, negative_first, true), std::invalid_argument);
}

TEST(CanonicalizeSign, PositiveFirstPixelUnchanged) {
    std::vector<AxisAngle> params(4, AxisAngle{0.7, {0, 0.6, 0.8}});
    params[0] = {0.9, {std::sqrt(0.75), 0.0, 0.5}};
    const ProcessMap m(2, params);
    const ProcessMap c = canonicalize_sign(m);
    EXPECT_EQ(c.params(), m.params());
    EXPECT_TRUE(c.canonicalized());
}

TEST(CanonicalizeSign, UniformNegativeAxisFlips) {
    const ProcessMap c = canonicalize_sign(ProcessMap::uniform(3, {kPi / 3, {0, 0, -1}}));
    for (const auto& p : c.params()) {
        EXPECT_NEAR(p.theta, 2 * kPi / 3, 1e-15);
        EXPECT_EQ(p.axis, (Vec3{0, 0, 1}));
    }
}

TEST(CanonicalizeSign, ZeroFirstPixelNzUnchanged) {
    const ProcessMap m = ProcessMap::uniform(2, {0.4, {-1, 0, 0}});
    EXPECT_EQ(canonicalize_sign(m).params(), m.params());
}

TEST(CanonicalizeSign, IdempotentAndFirstPixelNonNegative) {
    std::mt19937_64 gen(23);
    for (int t = 0; t < 200; ++t) {
        const ProcessMap once = canonicalize_sign(random_map(gen, 4));
        EXPECT_GE(once[0].axis.z, 0.0);
        EXPECT_EQ(canonicalize_sign(once).params(), once.params());
    }
}

TEST(MapFidelity, Examples) {
    std::mt19937_64 gen(29);
    const ProcessMap m = random_map(gen, 4);
    EXPECT_NEAR(map_fidelity(m, m), 1.0, 1e-15);
    EXPECT_NEAR(map_fidelity(m, m.negated()), 1.0, 1e-15);

    ProcessMap half = m;
    half[0] = half[0].negated();
    half[3] = half[3].negated();
    const ProcessMap two = [&] {
        std::vector<AxisAngle> p(m.params().begin(), m.params().begin() + 4);
        return ProcessMap(2, p);
    }();
    ProcessMap two_half = two;
    two_half[1] = two_half[1].negated();
    two_half[2] = two_half[2].negated();
    EXPECT_NEAR(map_fidelity(two, two_half), 0.0, 1e-15);
    EXPECT_NEAR(pixel_fidelity(two, two_half), 1.0, 1e-15);

    EXPECT_NEAR(pixel_fidelity(ProcessMap(3), ProcessMap::uniform(3, {kPi / 2, {1, 0, 0}})), 0.0, 1e-15);
    EXPECT_THROW((void)map_fidelity(ProcessMap(2), ProcessMap(3)), std::invalid_argument);
    EXPECT_THROW((void)pixel_fidelity(ProcessMap(2), ProcessMap(3)), std::invalid_argument);
}

TEST(MapFidelity, MatchesOracleAndBoundedByPixelFidelity) {
    std::mt19937_64 gen(31);
    for (int t = 0; t < 100; ++t) {
        const ProcessMap a = random_map(gen, 3);
        ProcessMap b = a;
        std::bernoulli_distribution flip(0.3);
        std::normal_distribution<double> jitter(0.0, 0.2);
        for (std::size_t k = 0; k < b.pixel_count(); ++k) {
            if (flip(gen)) b[k] = b[k].negated();
            b[k].theta = std::clamp(b[k].theta + jitter(gen), 0.0, kPi);
        }
        const double mf = map_fidelity(a, b);
        const double pf = pixel_fidelity(a, b);
        ASSERT_NEAR(mf, oracle_map_fidelity(a, b), 1e-12);
        ASSERT_LE(mf, pf + 1e-15);
        ASSERT_GE(mf, 0.0);
        ASSERT_LE(pf, 1.0);
        ASSERT_DOUBLE_EQ(mf, map_fidelity(b, a));
        ASSERT_DOUBLE_EQ(pf, pixel_fidelity(b, a));
        ASSERT_NEAR(mf, map_fidelity(canonicalize_sign(a), b), 1e-12);
        ASSERT_NEAR(pf, pixel_fidelity(a, canonicalize_sign(b)), 1e-12);
    }
}

}  // namespace
