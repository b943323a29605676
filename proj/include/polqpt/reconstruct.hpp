#pragma once

/// @file reconstruct.hpp
/// Recovering a ProcessMap from its five-image measurement stack.
///
/// Per pixel the five intensities are quadratic forms of the gate quaternion
/// q = (cos theta, sin theta n):
///   I_LL = w^2 + z^2          I_HH = w^2 + x^2
///   I_LH = 1/2 + wy + xz      I_LD = 1/2 + yz - wx      I_HD = 1/2 + wz + xy
/// so q and -q (the gates U and -U) are indistinguishable. Per-pixel fits pick
/// a fixed representative; `stitch_signs` restores spatial continuity.

#include <cstdint>
#include <vector>

#include "polqpt/forward_model.hpp"
#include "polqpt/process_map.hpp"

namespace polqpt {

using PixelObservation = PixelIntensities;

/// Closed-form intensities of a unit quaternion, in stack order.
[[nodiscard]] PixelIntensities model_intensities(const Quaternion& q) noexcept;

/// Sum of squared differences between observed and predicted intensities.
[[nodiscard]] double pixel_cost(const AxisAngle& candidate, const PixelObservation& obs) noexcept;
[[nodiscard]] double pixel_cost(const Quaternion& candidate, const PixelObservation& obs) noexcept;

/// Direct algebraic inversion. The intensities fix the rotation's image of the
/// L axis and two components of the image of the H axis; the third component
/// follows from orthogonality (both signs are returned when it is ill-posed).
/// Noisy inputs are projected onto the nearest rotation first.
[[nodiscard]] std::vector<Quaternion> analytic_candidates(const PixelObservation& obs);

/// The member of {p, -p} with n_z > 0; ties (n_z = 0) prefer n_x > 0, then n_y > 0.
/// Axis components below 1e-9 in magnitude are snapped to zero first.
[[nodiscard]] AxisAngle sign_representative(const AxisAngle& p) noexcept;

struct MLEConfig {
    int n_starts = 3;        ///< grid minima refined in addition to the analytic seeds
    int max_iters = 200;     ///< Levenberg-Marquardt iterations per start
    double tolerance = 1e-12;  ///< stop once the relative cost decrease falls below this
    int grid_theta = 24;
    int grid_polar = 24;
    int grid_azimuth = 48;
    std::size_t threads = 1;  ///< 0 = all cores

    void validate() const;
};

struct PixelFit {
    AxisAngle params;
    double cost = 0.0;
};

/// Coarse grid search over (theta, polar, azimuth) plus analytic seeds, each
/// refined by Levenberg-Marquardt on the unit quaternion. The grid is built once
/// per instance, so reuse one inverter across pixels.
class PixelInverter {
  public:
    explicit PixelInverter(const MLEConfig& cfg);

    /// Throws std::invalid_argument when `obs` has a non-finite entry.
    [[nodiscard]] PixelFit fit(const PixelObservation& obs) const;

  private:
    MLEConfig cfg_;
    std::vector<Quaternion> grid_;
};

/// Returns the n_z >= 0 representative of the best fit.
[[nodiscard]] AxisAngle invert_pixel(const PixelObservation& obs, const MLEConfig& cfg = {});

/// Levenberg-Marquardt refinement of a single start; returns the unit quaternion.
[[nodiscard]] Quaternion refine_quaternion(Quaternion start, const PixelObservation& obs, int max_iters,
                                           double tolerance);

/// Per-pixel sign choice by a confidence-ordered flood fill from the first
/// pixel. A pixel is flipped when the majority of its already-assigned
/// 4-neighbours disagree with it. Agreement combines Re Tr(U_nb^dagger U_px)
/// with continuity of theta and n between the two parameter representatives.
/// Pixels with sin(theta) < 1e-4 take the axis of the nearest well-resolved
/// pixel. Result is canonicalized.
[[nodiscard]] ProcessMap stitch_signs(const ProcessMap& raw);

/// Per-pixel MLE, sign stitching, then canonicalization. Output does not
/// depend on cfg.threads. Non-finite inputs throw std::invalid_argument naming
/// the pixel.
[[nodiscard]] ProcessMap reconstruct_map_mle(const MeasurementStack& stack, const MLEConfig& cfg = {});

struct GAConfig {
    int population_size = 64;
    int generations = 100;
    int tournament_size = 2;
    double crossover_rate = 0.1;
    double mutation_std = 0.6;       ///< initial Gaussian step (radians)
    double mutation_decay = 0.003;   ///< final step as a fraction of the initial one
    int elitism_count = 4;
    std::uint64_t rng_seed = 0;
    std::size_t threads = 1;
    bool stitch = false;             ///< run stitch_signs on the per-pixel results

    void validate() const;
};

struct GAResult {
    AxisAngle best;
    double best_cost = 0.0;
    std::vector<double> best_cost_per_generation;
};

/// Genetic minimization of pixel_cost over (theta, polar, azimuth): tournament
/// selection, blend crossover, annealed Gaussian mutation, elitism.
[[nodiscard]] GAResult ga_optimize_pixel(const PixelObservation& obs, const GAConfig& cfg, std::uint64_t seed);

/// Independent per-pixel GA (no spatial information) followed by sign
/// canonicalization; stitch_signs only when cfg.stitch is set.
[[nodiscard]] ProcessMap reconstruct_map_ga(const MeasurementStack& stack, const GAConfig& cfg = {});

}  // namespace polqpt
