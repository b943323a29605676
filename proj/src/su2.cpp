#include "polqpt/su2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polqpt {

namespace {

constexpr double kDegenerateSin = 1e-9;
constexpr double kDriftTolerance = 1e-12;

}  // namespace

double Vec3::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

double dot(const Vec3& a, const Vec3& b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }

SU2Matrix SU2Matrix::adjoint() const noexcept {
    return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

SU2Matrix SU2Matrix::operator-() const noexcept { return {-m_[0], -m_[1], -m_[2], -m_[3]}; }

SU2Matrix operator*(const SU2Matrix& a, const SU2Matrix& b) noexcept {
    const auto& x = a.m_;
    const auto& y = b.m_;
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

double SU2Matrix::unitarity_error() const noexcept {
    const SU2Matrix p = adjoint() * *this;
    return std::max({std::abs(p.m_[0] - 1.0), std::abs(p.m_[1]), std::abs(p.m_[2]),
                     std::abs(p.m_[3] - 1.0)});
}

bool SU2Matrix::is_special_unitary(double tol) const noexcept {
    return unitarity_error() < tol && std::abs(det() - 1.0) < tol;
}

double max_abs_diff(const SU2Matrix& a, const SU2Matrix& b) noexcept {
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
    }
    return worst;
}

Complex trace_overlap(const SU2Matrix& a, const SU2Matrix& b) noexcept {
    Complex sum{0.0};
    for (std::size_t k = 0; k < 4; ++k) sum += std::conj(a.entries()[k]) * b.entries()[k];
    return sum;
}

bool AxisAngle::is_valid(double axis_tol) const noexcept {
    if (!std::isfinite(theta) || !std::isfinite(axis.x) || !std::isfinite(axis.y) ||
        !std::isfinite(axis.z)) {
        return false;
    }
    return theta >= 0.0 && theta <= kPi && std::abs(axis.norm() - 1.0) < axis_tol;
}

Quaternion quaternion_from_axis_angle(const AxisAngle& p) noexcept {
    const double s = std::sin(p.theta);
    return {std::cos(p.theta), s * p.axis.x, s * p.axis.y, s * p.axis.z};
}

AxisAngle axis_angle_from_quaternion(const Quaternion& q) noexcept {
    const double len = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
    const double w = q.w / len;
    const Vec3 v{q.x / len, q.y / len, q.z / len};
    const double s = v.norm();
    AxisAngle out;
    out.theta = std::atan2(s, w);
    if (s >= kDegenerateSin) out.axis = {v.x / s, v.y / s, v.z / s};
    return out;
}

SU2Matrix su2_from_quaternion(const Quaternion& q) noexcept {
    const Complex a{q.w, -q.z};
    const Complex b{-q.y, -q.x};
    return {a, b, -std::conj(b), std::conj(a)};
}

Quaternion quaternion_from_su2(const SU2Matrix& u) noexcept {
    return {0.5 * (u(0, 0) + u(1, 1)).real(), -0.5 * (u(0, 1) + u(1, 0)).imag(),
            0.5 * (u(1, 0) - u(0, 1)).real(), 0.5 * (u(1, 1) - u(0, 0)).imag()};
}

SU2Matrix su2_from_axis_angle(const AxisAngle& p) noexcept {
    return su2_from_quaternion(quaternion_from_axis_angle(p));
}

AxisAngle axis_angle_from_su2(const SU2Matrix& u) noexcept {
    return axis_angle_from_quaternion(quaternion_from_su2(u));
}

SU2Matrix waveplate(double delta, double alpha) noexcept {
    // The matrix is 4pi-periodic in delta and pi-periodic in alpha.
    delta = std::fmod(delta, 2.0 * kTwoPi);
    alpha = std::fmod(alpha, kPi);
    const double c = std::cos(0.5 * delta);
    const double s = std::sin(0.5 * delta);
    const Complex off = Complex{0.0, s} * std::polar(1.0, -2.0 * alpha);
    return {Complex{c}, off, -std::conj(off), Complex{c}};
}

SU2Matrix compose(std::span<const SU2Matrix> plates) {
    if (plates.empty()) throw std::invalid_argument("compose: empty plate list");
    SU2Matrix total = plates.front();
    for (std::size_t k = 1; k < plates.size(); ++k) total = plates[k] * total;
    if (!total.is_special_unitary(kDriftTolerance)) total = project_to_su2(total);
    return total;
}

SU2Matrix project_to_su2(const SU2Matrix& u) noexcept {
    Complex a = 0.5 * (u(0, 0) + std::conj(u(1, 1)));
    Complex b = 0.5 * (u(0, 1) - std::conj(u(1, 0)));
    const double len = std::sqrt(std::norm(a) + std::norm(b));
    if (len == 0.0) return SU2Matrix::identity();
    a /= len;
    b /= len;
    return {a, b, -std::conj(b), std::conj(a)};
}

SphericalAxis spherical_from_axis(const Vec3& n) noexcept {
    SphericalAxis out;
    out.polar = std::acos(std::clamp(n.z, -1.0, 1.0));
    if (n.x == 0.0 && n.y == 0.0) return out;
    double az = std::atan2(n.y, n.x);
    if (az < 0.0) az += kTwoPi;
    if (az >= kTwoPi) az = 0.0;
    out.azimuth = az + 0.0;
    return out;
}

Vec3 axis_from_spherical(const SphericalAxis& s) noexcept {
    const double sp = std::sin(s.polar);
    return {sp * std::cos(s.azimuth), sp * std::sin(s.azimuth), std::cos(s.polar)};
}

}  // namespace polqpt
