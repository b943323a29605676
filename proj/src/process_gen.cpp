#include "polqpt/process_gen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polqpt {

namespace {

constexpr double kFlatRange = 1e-12;
constexpr double kZeroAxis = 1e-12;
constexpr int kMaxRedraws = 64;

}  // namespace

void FourierField::validate(int max_omega) const {
    if (n_pixels == 0) throw std::invalid_argument("FourierField: n_pixels must be positive");
    if (omega_x < 0 || omega_y < 0 || omega_x > max_omega || omega_y > max_omega) {
        throw std::invalid_argument("FourierField: frequencies must lie in [0, " + std::to_string(max_omega) +
                                    "]");
    }
    const auto expected = static_cast<std::size_t>((omega_x + 1) * (omega_y + 1));
    if (coefficients.size() != expected) {
        throw std::invalid_argument("FourierField: expected " + std::to_string(expected) + " coefficient sets");
    }
    for (const auto& c : coefficients) {
        for (double v : c) {
            if (!(std::abs(v) <= 1.0)) throw std::invalid_argument("FourierField: coefficient outside [-1, 1]");
        }
    }
}

double FourierField::evaluate(double x, double y) const noexcept {
    const double k = kTwoPi / static_cast<double>(n_pixels);
    double sum = 0.0;
    for (int i = 0; i <= omega_x; ++i) {
        const double cx = std::cos(k * i * x);
        const double sx = std::sin(k * i * x);
        for (int j = 0; j <= omega_y; ++j) {
            const double cy = std::cos(k * j * y);
            const double sy = std::sin(k * j * y);
            const auto& c = coefficients[i * (omega_y + 1) + j];
            sum += c[0] * cx * cy + c[1] * cx * sy + c[2] * sx * cy + c[3] * sx * sy;
        }
    }
    return sum;
}

FourierField FourierField::random(std::size_t n_pixels, int max_omega, Rng& rng) {
    FourierField series;
    series.n_pixels = n_pixels;
    series.omega_x = rng.uniform_int(0, max_omega);
    series.omega_y = rng.uniform_int(0, max_omega);
    series.coefficients.resize(static_cast<std::size_t>((series.omega_x + 1) * (series.omega_y + 1)));
    for (auto& c : series.coefficients) {
        for (double& v : c) v = rng.uniform(-1.0, 1.0);
    }
    return series;
}

FourierField FourierField::zero(std::size_t n_pixels, int omega_x, int omega_y) {
    FourierField series;
    series.n_pixels = n_pixels;
    series.omega_x = omega_x;
    series.omega_y = omega_y;
    series.coefficients.assign(static_cast<std::size_t>((omega_x + 1) * (omega_y + 1)), {0.0, 0.0, 0.0, 0.0});
    return series;
}

std::pair<double, double> rotate_frame(double x, double y, double xi) noexcept {
    const double c = std::cos(xi);
    const double s = std::sin(xi);
    return {c * x - s * y, s * x + c * y};
}

double grid_center(std::size_t n_pixels) noexcept { return 0.5 * (static_cast<double>(n_pixels) - 1.0); }

std::vector<double> sample_fourier_field(const FourierField& series) { return sample_fourier_field(series, 0.0); }

std::vector<double> sample_fourier_field(const FourierField& series, double xi) {
    const std::size_t n = series.n_pixels;
    const double center = grid_center(n);
    std::vector<double> out(n * n);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col < n; ++col) {
            double x = static_cast<double>(col);
            double y = static_cast<double>(row);
            if (xi != 0.0) {
                const auto [rx, ry] = rotate_frame(x - center, y - center, xi);
                x = rx + center;
                y = ry + center;
            }
            out[row * n + col] = series.evaluate(x, y);
        }
    }
    return out;
}

void rescale_min_max(std::span<double> values, double lo, double hi) noexcept {
    if (values.empty()) return;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double vmin = *mn;
    const double range = *mx - vmin;
    if (range < kFlatRange) {
        std::fill(values.begin(), values.end(), 0.5 * (lo + hi));
        return;
    }
    for (double& v : values) v = std::clamp(lo + (hi - lo) * (v - vmin) / range, lo, hi);
}

void GeneratorConfig::validate() const {
    if (n_pixels < 2) throw std::invalid_argument("GeneratorConfig: n_pixels must be at least 2");
    if (!(xi_max >= 0.0)) throw std::invalid_argument("GeneratorConfig: xi_max must be non-negative");
    if (max_omega < 0) throw std::invalid_argument("GeneratorConfig: max_omega must be non-negative");
}

RawProcessFields draw_process_fields(const GeneratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    RawProcessFields raw;
    for (auto& series : raw.series) series = FourierField::random(cfg.n_pixels, cfg.max_omega, rng);
    raw.xi = rng.uniform(-cfg.xi_max, cfg.xi_max);
    for (std::size_t m = 0; m < 4; ++m) raw.samples[m] = sample_fourier_field(raw.series[m], raw.xi);
    return raw;
}

std::optional<ProcessMap> process_from_fields(const RawProcessFields& fields, std::size_t n_pixels) {
    auto theta = fields.samples[0];
    auto nx = fields.samples[1];
    auto ny = fields.samples[2];
    auto nz = fields.samples[3];
    rescale_min_max(theta, 0.0, kPi);
    rescale_min_max(nx, -1.0, 1.0);
    rescale_min_max(ny, -1.0, 1.0);
    rescale_min_max(nz, -1.0, 1.0);

    std::vector<AxisAngle> params(n_pixels * n_pixels);
    bool any_axis = false;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const Vec3 v{nx[k], ny[k], nz[k]};
        const double len = v.norm();
        params[k].theta = theta[k];
        if (len >= kZeroAxis) {
            params[k].axis = {v.x / len, v.y / len, v.z / len};
            any_axis = true;
        }
    }
    if (!any_axis) return std::nullopt;
    return canonicalize_sign(ProcessMap(n_pixels, std::move(params)));
}

ProcessMap random_process(const GeneratorConfig& cfg, std::uint64_t seed) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
        if (auto m = process_from_fields(draw_process_fields(cfg, s), cfg.n_pixels)) return *std::move(m);
    }
    throw std::runtime_error("random_process: every redraw produced a degenerate axis field");
}

void Plate::validate() const {
    if (!std::isfinite(delta) || !std::isfinite(alpha0)) {
        throw std::invalid_argument("Plate: delta and alpha0 must be finite");
    }
    if ((kind == PlateKind::g_plate_x || kind == PlateKind::g_plate_y) && !(lambda > 0.0)) {
        throw std::invalid_argument("Plate: grating period must be positive");
    }
    if (kind == PlateKind::q_plate && !std::isfinite(q)) throw std::invalid_argument("Plate: q must be finite");
}

double Plate::optic_axis(double x, double y) const noexcept {
    switch (kind) {
        case PlateKind::uniform:
            return alpha0;
        case PlateKind::g_plate_x:
            return alpha0 + kPi * x / lambda;
        case PlateKind::g_plate_y:
            return alpha0 + kPi * y / lambda;
        case PlateKind::q_plate:
            return alpha0 + q * std::atan2(y, x);
    }
    return alpha0;
}

double Window::x_at(std::size_t col, std::size_t n) const noexcept {
    return x_min + (static_cast<double>(col) + 0.5) * (x_max - x_min) / static_cast<double>(n);
}

double Window::y_at(std::size_t row, std::size_t n) const noexcept {
    return y_min + (static_cast<double>(row) + 0.5) * (y_max - y_min) / static_cast<double>(n);
}

Window Window::around(std::span<const Plate> plates) {
    double period = 0.0;
    for (const auto& p : plates) {
        if (p.kind == PlateKind::g_plate_x || p.kind == PlateKind::g_plate_y) period = std::max(period, p.lambda);
    }
    if (period == 0.0) period = 1.0;
    return square(2.0 * period);
}

ProcessMap plate_process(std::span<const Plate> plates, std::size_t n_pixels, const Window& window) {
    if (plates.empty()) throw std::invalid_argument("plate_process: empty plate stack");
    if (n_pixels == 0) throw std::invalid_argument("plate_process: n_pixels must be positive");
    for (const auto& p : plates) p.validate();

    std::vector<AxisAngle> params(n_pixels * n_pixels);
    std::vector<SU2Matrix> gates(plates.size());
    for (std::size_t row = 0; row < n_pixels; ++row) {
        const double y = window.y_at(row, n_pixels);
        for (std::size_t col = 0; col < n_pixels; ++col) {
            const double x = window.x_at(col, n_pixels);
            for (std::size_t k = 0; k < plates.size(); ++k) {
                gates[k] = waveplate(plates[k].delta, plates[k].optic_axis(x, y));
            }
            params[row * n_pixels + col] = axis_angle_from_su2(compose(gates));
        }
    }
    return canonicalize_sign(ProcessMap(n_pixels, std::move(params)));
}

ProcessMap plate_process(std::span<const Plate> plates, std::size_t n_pixels) {
    return plate_process(plates, n_pixels, Window::around(plates));
}

std::vector<Plate> three_plate_grating_stack(double lambda) {
    return {Plate::uniform(kPi / 2), Plate::grating_x(kPi / 2, lambda), Plate::grating_y(kPi / 2, lambda)};
}

std::vector<Plate> six_plate_grating_stack(double lambda) {
    auto stack = three_plate_grating_stack(lambda);
    stack.push_back(Plate::uniform(kPi / 2));
    stack.push_back(Plate::grating_x(1.0, lambda / 2));
    stack.push_back(Plate::grating_y(1.0, lambda / 2));
    return stack;
}

std::vector<PatternedPlate> draw_patterned_plates(std::uint64_t seed, std::size_t n_pixels) {
    Rng rng(seed);
    const int count = 1 + rng.uniform_int(0, 1);
    std::vector<PatternedPlate> plates(static_cast<std::size_t>(count));
    for (auto& p : plates) {
        p.delta = rng.uniform(0.0, kTwoPi);
        p.alpha = FourierField::random(n_pixels, 3, rng);
    }
    return plates;
}

ProcessMap patterned_plate_process(std::span<const PatternedPlate> plates, std::size_t n_pixels) {
    if (plates.empty()) throw std::invalid_argument("patterned_plate_process: empty plate stack");
    std::vector<std::vector<double>> alphas;
    alphas.reserve(plates.size());
    for (const auto& p : plates) alphas.push_back(sample_fourier_field(p.alpha));

    std::vector<AxisAngle> params(n_pixels * n_pixels);
    std::vector<SU2Matrix> gates(plates.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (std::size_t p = 0; p < plates.size(); ++p) gates[p] = waveplate(plates[p].delta, alphas[p][k]);
        params[k] = axis_angle_from_su2(compose(gates));
    }
    return ProcessMap(n_pixels, std::move(params));
}

ProcessMap single_plate_random(std::uint64_t seed, std::size_t n_pixels) {
    return canonicalize_sign(patterned_plate_process(draw_patterned_plates(seed, n_pixels), n_pixels));
}

}  // namespace polqpt
