#pragma once

/// @file forward_model.hpp
/// The minimal five-measurement polarimetric stack {I_LL, I_LH, I_LD, I_HH, I_HD}
/// of a process map, measurement noise, and the stack-to-stack discrepancy.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "polqpt/process_map.hpp"

namespace polqpt {

enum class Polarization { L, R, H, V, D, A };

/// Polarization state written in the circular basis.
struct StokesState {
    Polarization label;
    std::array<Complex, 2> amplitudes;

    static StokesState of(Polarization p) noexcept;
};

[[nodiscard]] std::string_view to_string(Polarization p) noexcept;

/// |<b| U |a>|^2: prepare `a`, apply U, project onto `b`.
[[nodiscard]] double projective_intensity(const SU2Matrix& u, const StokesState& a, const StokesState& b) noexcept;

inline constexpr std::size_t kMeasurementCount = 5;

/// (preparation, projection) pairs in stack order.
inline constexpr std::array<std::array<Polarization, 2>, kMeasurementCount> kMeasurementPairs{{
    {Polarization::L, Polarization::L},
    {Polarization::L, Polarization::H},
    {Polarization::L, Polarization::D},
    {Polarization::H, Polarization::H},
    {Polarization::H, Polarization::D},
}};

inline constexpr std::array<std::string_view, kMeasurementCount> kMeasurementNames{"LL", "LH", "LD", "HH", "HD"};

using PixelIntensities = std::array<double, kMeasurementCount>;

/// The five intensities of a single gate, in stack order.
[[nodiscard]] PixelIntensities pixel_intensities(const SU2Matrix& u) noexcept;

struct MeasurementStack {
    std::size_t n_pixels = 0;
    std::array<std::vector<double>, kMeasurementCount> images;  ///< each row-major N x N
    bool noisy = false;
    double sigma = 0.0;

    MeasurementStack() = default;
    explicit MeasurementStack(std::size_t n);

    [[nodiscard]] PixelIntensities pixel(std::size_t index) const noexcept;
    void set_pixel(std::size_t index, const PixelIntensities& values) noexcept;
    [[nodiscard]] std::size_t pixel_count() const noexcept { return n_pixels * n_pixels; }

    friend bool operator==(const MeasurementStack&, const MeasurementStack&) = default;
};

[[nodiscard]] MeasurementStack measurement_stack(const ProcessMap& m, std::size_t threads = 1);

inline constexpr double kDefaultNoiseSigma = 0.02;

/// Adds i.i.d. Gaussian(0, sigma) to every value. Each value's noise is a pure
/// function of (seed, image, pixel). Values are not clamped. Throws
/// std::invalid_argument for sigma < 0 or an already-noisy stack.
[[nodiscard]] MeasurementStack add_noise(const MeasurementStack& s, double sigma, std::uint64_t seed);

/// (1 / 5N^2) sum_p sum_xy (I_a - I_b)^2. Throws std::invalid_argument on size mismatch.
[[nodiscard]] double polarimetric_infidelity(const MeasurementStack& a, const MeasurementStack& b);

}  // namespace polqpt
