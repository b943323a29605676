#pragma once

/// @file su2.hpp
/// SU(2) algebra for single-pixel polarization gates.
///
/// Matrices are written in the circular polarization basis |L> = (1,0),
/// |R> = (0,1). A gate is parametrized as U = cos(theta) I - i sin(theta) n.sigma,
/// i.e. a rotation by 2*theta about the unit axis n on the Poincare sphere.

#include <array>
#include <complex>
#include <numbers>
#include <span>

namespace polqpt {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    [[nodiscard]] double norm() const noexcept;
    [[nodiscard]] Vec3 operator-() const noexcept { return {-x, -y, -z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

[[nodiscard]] double dot(const Vec3& a, const Vec3& b) noexcept;

/// 2x2 complex matrix, row-major. Instances produced by this library are
/// special unitary; `is_special_unitary` checks that claim.
class SU2Matrix {
  public:
    SU2Matrix() noexcept : m_{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}} {}
    SU2Matrix(Complex a00, Complex a01, Complex a10, Complex a11) noexcept
        : m_{a00, a01, a10, a11} {}

    static SU2Matrix identity() noexcept { return {}; }

    [[nodiscard]] Complex operator()(int row, int col) const noexcept { return m_[2 * row + col]; }
    [[nodiscard]] const std::array<Complex, 4>& entries() const noexcept { return m_; }

    [[nodiscard]] SU2Matrix adjoint() const noexcept;
    [[nodiscard]] Complex trace() const noexcept { return m_[0] + m_[3]; }
    [[nodiscard]] Complex det() const noexcept { return m_[0] * m_[3] - m_[1] * m_[2]; }
    [[nodiscard]] SU2Matrix operator-() const noexcept;

    /// max-norm of U^dagger U - I
    [[nodiscard]] double unitarity_error() const noexcept;
    [[nodiscard]] bool is_special_unitary(double tol = 1e-12) const noexcept;

    friend SU2Matrix operator*(const SU2Matrix& a, const SU2Matrix& b) noexcept;
    friend bool operator==(const SU2Matrix&, const SU2Matrix&) = default;

  private:
    std::array<Complex, 4> m_;
};

/// Largest entrywise modulus of a - b.
[[nodiscard]] double max_abs_diff(const SU2Matrix& a, const SU2Matrix& b) noexcept;

/// Tr(a^dagger b).
[[nodiscard]] Complex trace_overlap(const SU2Matrix& a, const SU2Matrix& b) noexcept;

/// Rotation angle theta and unit axis. theta lives in [0, pi]; the endpoint
/// theta = pi is kept because sign canonicalization maps theta = 0 onto it.
/// When sin(theta) vanishes the axis is conventionally (0,0,1).
struct AxisAngle {
    double theta = 0.0;
    Vec3 axis{0.0, 0.0, 1.0};

    [[nodiscard]] bool is_valid(double axis_tol = 1e-9) const noexcept;
    /// Parameters of -U: (pi - theta, -n).
    [[nodiscard]] AxisAngle negated() const noexcept { return {kPi - theta, -axis}; }
    friend bool operator==(const AxisAngle&, const AxisAngle&) = default;
};

/// Polar/azimuthal angles of a rotation axis on the Poincare sphere.
struct SphericalAxis {
    double polar = 0.0;    ///< [0, pi]
    double azimuth = 0.0;  ///< [0, 2pi)
};

/// Unit quaternion (w, x, y, z) = (cos theta, sin theta * n). Same group
/// element as the SU2Matrix [[w - iz, -y - ix], [y - ix, w + iz]].
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

[[nodiscard]] SU2Matrix su2_from_axis_angle(const AxisAngle& p) noexcept;
[[nodiscard]] AxisAngle axis_angle_from_su2(const SU2Matrix& u) noexcept;

[[nodiscard]] Quaternion quaternion_from_axis_angle(const AxisAngle& p) noexcept;
[[nodiscard]] AxisAngle axis_angle_from_quaternion(const Quaternion& q) noexcept;
[[nodiscard]] SU2Matrix su2_from_quaternion(const Quaternion& q) noexcept;
[[nodiscard]] Quaternion quaternion_from_su2(const SU2Matrix& u) noexcept;

/// Waveplate with retardance `delta` and optic axis at `alpha` from horizontal:
/// [[cos(d/2), i sin(d/2) e^{-2i alpha}], [i sin(d/2) e^{2i alpha}, cos(d/2)]].
[[nodiscard]] SU2Matrix waveplate(double delta, double alpha) noexcept;

/// Product of plates given in optical order (plates[0] acts first, so it is
/// the rightmost factor). Throws std::invalid_argument on an empty list.
[[nodiscard]] SU2Matrix compose(std::span<const SU2Matrix> plates);

/// Nearest special unitary matrix in Frobenius norm.
[[nodiscard]] SU2Matrix project_to_su2(const SU2Matrix& u) noexcept;

[[nodiscard]] SphericalAxis spherical_from_axis(const Vec3& n) noexcept;
[[nodiscard]] Vec3 axis_from_spherical(const SphericalAxis& s) noexcept;

}  // namespace polqpt
