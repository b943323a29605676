// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "polqpt/dataset_io.hpp"
#include "polqpt/forward_model.hpp"
#include "polqpt/process_gen.hpp"
#include "polqpt/reconstruct.hpp"
#include "test_support.hpp"

namespace {

using namespace polqpt;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

constexpr std::size_t kProcessCount = 20;
constexpr double kSigma = 0.02;

std::vector<ProcessMap> round_trip_processes() {
    GeneratorConfig cfg;
    cfg.n_pixels = 16;
    cfg.max_omega = 5;
    std::vector<ProcessMap> maps;
    for (std::uint64_t seed = 0; seed < kProcessCount; ++seed) maps.push_back(random_process(cfg, seed));
    return maps;
}

Outcome forward_model_exactness() {
    const auto start = Clock::now();
    const double r = 1.0 / std::sqrt(2.0);
    const SU2Matrix w{Complex{r}, Complex{0, r}, Complex{0, r}, Complex{r}};
    const double plate_error = max_abs_diff(waveplate(kPi / 2, 0.0), w);

    const MeasurementStack id = measurement_stack(ProcessMap(8));
    const PixelIntensities expected{1.0, 0.5, 0.5, 1.0, 0.5};
    double stack_error = 0.0;
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        for (double v : id.images[p]) stack_error = std::max(stack_error, std::abs(v - expected[p]));
    }
    const double t = seconds_since(start);
    return {plate_error <= 1e-12 && stack_error <= 1e-12 && t < 1.0,
            fmt("waveplate error %.2e, identity stack error %.2e, %.3f s", plate_error, stack_error, t)};
}

Outcome closed_form_intensity() {
    std::mt19937_64 gen(20240601);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const AxisAngle p = testing_support::random_axis_angle(gen);
        const double c = std::cos(p.theta), s = std::sin(p.theta);
        const double expected = c * c + s * s * p.axis.z * p.axis.z;
        worst = std::max(worst, std::abs(pixel_intensities(su2_from_axis_angle(p))[0] - expected));
    }
    return {worst <= 1e-12, fmt("max |I_LL - closed form| = %.2e over 10^4 pixels", worst)};
}

struct RoundTripStats {
    double clean_mean_infidelity = 0.0;
    double noisy_mean_infidelity = 0.0;
    double clean_seconds = 0.0;
    double worst_noisy_delta = 0.0;
};

RoundTripStats run_round_trips() {
    RoundTripStats stats;
    const auto maps = round_trip_processes();
    MLEConfig cfg;
    cfg.threads = 1;
    const auto start = Clock::now();
    for (const auto& truth : maps) {
        stats.clean_mean_infidelity += 1.0 - map_fidelity(reconstruct_map_mle(measurement_stack(truth), cfg), truth);
    }
    stats.clean_seconds = seconds_since(start);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const MeasurementStack noisy = add_noise(measurement_stack(maps[i]), kSigma, derive_seed(7, i));
        const ProcessMap fit = reconstruct_map_mle(noisy, cfg);
        stats.noisy_mean_infidelity += 1.0 - map_fidelity(fit, maps[i]);
        stats.worst_noisy_delta = std::max(stats.worst_noisy_delta, polarimetric_infidelity(measurement_stack(fit), noisy));
    }
    stats.clean_mean_infidelity /= static_cast<double>(maps.size());
    stats.noisy_mean_infidelity /= static_cast<double>(maps.size());
    return stats;
}

Outcome round_trip(const RoundTripStats& s) {
    return {s.clean_mean_infidelity <= 1e-3 && s.clean_seconds < 120.0,
            fmt("mean map infidelity %.4g (limit 1e-3) over 20 processes, %.1f s single-thread",
                s.clean_mean_infidelity, s.clean_seconds)};
}

Outcome noise_robustness(const RoundTripStats& s) {
    const double increase = s.noisy_mean_infidelity - s.clean_mean_infidelity;
    const double limit = 3 * kSigma * kSigma;
    return {increase <= 0.05 && s.worst_noisy_delta <= limit,
            fmt("infidelity %.4g -> %.4g (increase %.4g, limit 0.05); worst polarimetric infidelity %.3e (limit %.1e)",
                s.clean_mean_infidelity, s.noisy_mean_infidelity, increase, s.worst_noisy_delta, limit)};
}

Outcome metric_separation() {
    std::mt19937_64 gen(31337);
    double min_ga_gap = 1.0, max_mle_gap = 0.0;
    int crossing = 0;
    const int maps = 5;
    for (int t = 0; t < maps; ++t) {
        const ProcessMap truth =
            t == 0 ? testing_support::smooth_map(16)
                   : testing_support::smooth_map(16, testing_support::random_smooth_params(gen));
        bool pos = false, neg = false;
        for (const auto& p : truth.params()) {
            pos = pos || p.axis.z > 1e-3;
            neg = neg || p.axis.z < -1e-3;
        }
        crossing += (pos && neg) ? 1 : 0;
        const MeasurementStack stack = measurement_stack(truth);
        const ProcessMap ga = reconstruct_map_ga(stack);
        const ProcessMap mle = reconstruct_map_mle(stack);
        min_ga_gap = std::min(min_ga_gap, pixel_fidelity(ga, truth) - map_fidelity(ga, truth));
        max_mle_gap = std::max(max_mle_gap, pixel_fidelity(mle, truth) - map_fidelity(mle, truth));
    }
    return {crossing == maps && min_ga_gap >= 0.05 && max_mle_gap <= 1e-3,
            fmt("%d/%d maps with n_z sign change; min GA gap %.4f (>= 0.05), max stitched MLE gap %.2e (<= 1e-3)",
                crossing, maps, min_ga_gap, max_mle_gap)};
}

Outcome noise_floor() {
    GeneratorConfig cfg;
    cfg.n_pixels = 64;
    const MeasurementStack clean = measurement_stack(random_process(cfg, 64));
    const double delta = polarimetric_infidelity(clean, add_noise(clean, kSigma, 99));
    const double target = kSigma * kSigma;
    return {std::abs(delta - target) <= 0.25 * target,
            fmt("Delta = %.4e vs sigma^2 = %.1e (ratio %.3f)", delta, target, delta / target)};
}

Outcome plate_experiments() {
    const double lambda = 1.0;
    std::string detail;
    bool pass = true;
    for (const auto& [name, plates] : {std::pair{"three-plate", three_plate_grating_stack(lambda)},
                                       std::pair{"six-plate", six_plate_grating_stack(lambda)}}) {
        const ProcessMap truth = plate_process(plates, 64, Window::square(lambda));
        const auto start = Clock::now();
        const ProcessMap fit = reconstruct_map_mle(measurement_stack(truth));
        const double t = seconds_since(start);
        const double f = map_fidelity(fit, truth);
        pass = pass && f >= 0.99 && t < 60.0;
        detail += fmt("%s F = %.10f in %.2f s; ", name, f, t);
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

Outcome dataset_format() {
    testing_support::TempDir tmp;
    GeneratorConfig cfg;
    cfg.n_pixels = 2;
    const ProcessMap map = random_process(cfg, 1);
    const MeasurementStack stack = add_noise(measurement_stack(map), kSigma, 2);
    const std::pair<MeasurementStack, ProcessMap> sample{stack, map};
    const auto dir = tmp / "ds";
    (void)write_dataset(std::span(&sample, 1), dir, {});
    const auto bytes = std::filesystem::file_size(dir / "inputs.bin");

    const SampleRecord expected = encode_sample(stack, map);
    const SampleRecord got = read_dataset(dir).record(0);
    const bool exact = got.inputs.size() == expected.inputs.size() && got.targets.size() == expected.targets.size() &&
                       std::memcmp(got.inputs.data(), expected.inputs.data(), 4 * got.inputs.size()) == 0 &&
                       std::memcmp(got.targets.data(), expected.targets.data(), 4 * got.targets.size()) == 0;

    std::filesystem::resize_file(dir / "inputs.bin", bytes - 4);
    bool rejected = false;
    try {
        (void)read_dataset(dir);
    } catch (const CorruptDatasetError&) {
        rejected = true;
    }
    return {bytes == 80 && exact && rejected,
            fmt("inputs.bin %llu bytes, round-trip %s, truncated file %s", static_cast<unsigned long long>(bytes),
                exact ? "bit-exact" : "MISMATCH", rejected ? "rejected" : "ACCEPTED")};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](const char* name, const Outcome& o) {
        std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };
    report("forward-model exactness", forward_model_exactness());
    report("closed-form I_LL", closed_form_intensity());
    const RoundTripStats stats = run_round_trips();
    report("round-trip tomography", round_trip(stats));
    report("noise robustness", noise_robustness(stats));
    report("metric separation", metric_separation());
    report("noise floor", noise_floor());
    report("plate experiments", plate_experiments());
    report("dataset format", dataset_format());
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
