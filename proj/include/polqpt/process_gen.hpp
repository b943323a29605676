#pragma once

/// @file process_gen.hpp
/// Synthetic space-dependent processes: random band-limited Fourier fields,
/// random single/two-plate processes, and patterned-waveplate device stacks.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polqpt/process_map.hpp"
#include "polqpt/rng.hpp"

namespace polqpt {

/// Band-limited random field
///   f(x,y) = sum_{i<=omega_x, j<=omega_y} c1 cos(kx i) cos(ky j) + c2 cos sin + c3 sin cos + c4 sin sin
/// with k = 2 pi / N. Coordinates are pixel units; (0,0) is the first pixel.
struct FourierField {
    int omega_x = 0;
    int omega_y = 0;
    /// (omega_x + 1) * (omega_y + 1) entries, index i * (omega_y + 1) + j.
    std::vector<std::array<double, 4>> coefficients;
    std::size_t n_pixels = 0;

    /// Throws std::invalid_argument when frequencies exceed `max_omega`,
    /// coefficients leave [-1, 1], or the coefficient count is wrong.
    void validate(int max_omega = 5) const;

    [[nodiscard]] double evaluate(double x, double y) const noexcept;
    [[nodiscard]] std::array<double, 4>& coefficient(int i, int j) { return coefficients[i * (omega_y + 1) + j]; }

    /// Draws omega_x, omega_y uniformly in [0, max_omega] and all coefficients in [-1, 1].
    static FourierField random(std::size_t n_pixels, int max_omega, Rng& rng);
    static FourierField zero(std::size_t n_pixels, int omega_x, int omega_y);
};

/// Row-major N x N samples of the field on the pixel grid.
[[nodiscard]] std::vector<double> sample_fourier_field(const FourierField& series);

/// Samples the field at pixel coordinates rotated by `xi` about the grid center.
[[nodiscard]] std::vector<double> sample_fourier_field(const FourierField& series, double xi);

/// Rotates center-relative coordinates by `xi`.
[[nodiscard]] std::pair<double, double> rotate_frame(double x, double y, double xi) noexcept;

/// Grid center in pixel coordinates.
[[nodiscard]] double grid_center(std::size_t n_pixels) noexcept;

struct GeneratorConfig {
    std::size_t n_pixels = 64;
    double xi_max = 5.0 * kPi / 180.0;
    int max_omega = 5;

    void validate() const;
};

/// The four raw (unrescaled) parameter fields theta, n_x, n_y, n_z of one draw.
struct RawProcessFields {
    std::array<FourierField, 4> series;
    double xi = 0.0;
    std::array<std::vector<double>, 4> samples;
};

[[nodiscard]] RawProcessFields draw_process_fields(const GeneratorConfig& cfg, std::uint64_t seed);

/// Builds a canonicalized ProcessMap from raw fields: min-max rescaling of theta
/// to [0, pi] and of the axis fields to [-1, 1], per-pixel normalization of n,
/// then sign canonicalization. Returns nullopt when every axis pixel is zero.
[[nodiscard]] std::optional<ProcessMap> process_from_fields(const RawProcessFields& fields, std::size_t n_pixels);

/// Random smooth process. Deterministic in `seed`; degenerate draws are redrawn
/// with a derived seed.
[[nodiscard]] ProcessMap random_process(const GeneratorConfig& cfg, std::uint64_t seed);

/// Min-max rescale into [lo, hi]; a constant input maps to the midpoint.
void rescale_min_max(std::span<double> values, double lo, double hi) noexcept;

enum class PlateKind { uniform, g_plate_x, g_plate_y, q_plate };

struct Plate {
    PlateKind kind = PlateKind::uniform;
    double delta = 0.0;
    double alpha0 = 0.0;
    double lambda = 1.0;  ///< grating period, same length unit as the window
    double q = 0.5;       ///< topological charge

    void validate() const;
    /// Optic-axis orientation at physical coordinates (x, y) measured from the center.
    [[nodiscard]] double optic_axis(double x, double y) const noexcept;

    static Plate uniform(double delta, double alpha0 = 0.0) { return {PlateKind::uniform, delta, alpha0}; }
    static Plate grating_x(double delta, double lambda) { return {PlateKind::g_plate_x, delta, 0.0, lambda}; }
    static Plate grating_y(double delta, double lambda) { return {PlateKind::g_plate_y, delta, 0.0, lambda}; }
    static Plate q_plate(double delta, double q) { return {PlateKind::q_plate, delta, 0.0, 1.0, q}; }
};

/// Physical extent mapped onto the pixel grid. Pixel (row, col) samples the
/// point at the center of its cell; x follows columns and y follows rows.
struct Window {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;

    [[nodiscard]] double x_at(std::size_t col, std::size_t n) const noexcept;
    [[nodiscard]] double y_at(std::size_t row, std::size_t n) const noexcept;

    /// [-2L, 2L]^2 where L is the largest grating period in the stack (1 if none).
    static Window around(std::span<const Plate> plates);
    static Window square(double half_width) { return {-half_width, half_width, -half_width, half_width}; }
};

/// Composes the plates (optical order, first element hit first) at every pixel.
/// Throws std::invalid_argument on an empty stack.
[[nodiscard]] ProcessMap plate_process(std::span<const Plate> plates, std::size_t n_pixels,
                                       const Window& window);
[[nodiscard]] ProcessMap plate_process(std::span<const Plate> plates, std::size_t n_pixels);

/// Optical-order stack for T_y,L(pi/2) T_x,L(pi/2) W.
[[nodiscard]] std::vector<Plate> three_plate_grating_stack(double lambda);
/// Optical-order stack for T_y,L/2(1) T_x,L/2(1) W T_y,L(pi/2) T_x,L(pi/2) W.
[[nodiscard]] std::vector<Plate> six_plate_grating_stack(double lambda);

/// One random plate with a Fourier-patterned optic axis.
struct PatternedPlate {
    double delta = 0.0;
    FourierField alpha;
};

[[nodiscard]] std::vector<PatternedPlate> draw_patterned_plates(std::uint64_t seed, std::size_t n_pixels);

/// Canonicalized single- or two-plate process with random retardances in
/// [0, 2pi) and optic axes drawn as Fourier fields with frequencies <= 3.
[[nodiscard]] ProcessMap single_plate_random(std::uint64_t seed, std::size_t n_pixels);

/// Same process before canonicalization.
[[nodiscard]] ProcessMap patterned_plate_process(std::span<const PatternedPlate> plates, std::size_t n_pixels);

}  // namespace polqpt
