#pragma once

#include <cstddef>
#include <vector>

#include "polqpt/su2.hpp"

namespace polqpt {

/// Space-dependent gate sampled on an N x N pixel grid. Pixels are stored
/// row-major; row is the y index (increasing downward), column the x index.
/// The "first pixel" used by sign canonicalization is (row 0, col 0).
class ProcessMap {
  public:
    ProcessMap() = default;
    /// N x N map filled with the identity gate. Throws std::invalid_argument if n == 0.
    explicit ProcessMap(std::size_t n);
    /// Throws std::invalid_argument unless params.size() == n * n and every
    /// pixel is a valid AxisAngle.
    ProcessMap(std::size_t n, std::vector<AxisAngle> params, bool canonicalized = false);

    static ProcessMap uniform(std::size_t n, const AxisAngle& p);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t pixel_count() const noexcept { return params_.size(); }
    [[nodiscard]] bool canonicalized() const noexcept { return canonicalized_; }
    void set_canonicalized(bool value) noexcept { canonicalized_ = value; }

    [[nodiscard]] const AxisAngle& at(std::size_t row, std::size_t col) const { return params_[row * n_ + col]; }
    [[nodiscard]] AxisAngle& at(std::size_t row, std::size_t col) { return params_[row * n_ + col]; }
    [[nodiscard]] const AxisAngle& operator[](std::size_t index) const { return params_[index]; }
    [[nodiscard]] AxisAngle& operator[](std::size_t index) { return params_[index]; }
    [[nodiscard]] const std::vector<AxisAngle>& params() const noexcept { return params_; }

    [[nodiscard]] SU2Matrix gate(std::size_t index) const { return su2_from_axis_angle(params_[index]); }

    /// Map of -U at every pixel.
    [[nodiscard]] ProcessMap negated() const;

    [[nodiscard]] bool is_valid() const noexcept;

  private:
    std::size_t n_ = 0;
    std::vector<AxisAngle> params_;
    bool canonicalized_ = false;
};

/// If n_z of the first pixel is strictly negative, replaces every pixel by
/// (pi - theta, -n). Always marks the result canonicalized. Idempotent.
[[nodiscard]] ProcessMap canonicalize_sign(ProcessMap m);

/// (1 / 2N^2) |sum_xy Tr(U_a^dagger U_b)|. Sensitive to relative pixel signs.
/// Throws std::invalid_argument when the sizes differ.
[[nodiscard]] double map_fidelity(const ProcessMap& a, const ProcessMap& b);

/// (1 / 2N^2) sum_xy |Tr(U_a^dagger U_b)|. Blind to relative pixel signs.
[[nodiscard]] double pixel_fidelity(const ProcessMap& a, const ProcessMap& b);

}  // namespace polqpt
