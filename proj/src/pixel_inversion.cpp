#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "polqpt/reconstruct.hpp"

namespace polqpt {

namespace {

constexpr double kSnap = 1e-9;
constexpr double kStartSeparation = 0.95;  // |q_a . q_b| above this counts as the same start

Quaternion normalized(const Quaternion& q) noexcept {
    const double len = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
    return {q.w / len, q.x / len, q.y / len, q.z / len};
}

double qdot(const Quaternion& a, const Quaternion& b) noexcept {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

Quaternion quaternion_from_rotation(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Eigen::Matrix3d r = svd.matrixU() * d * svd.matrixV().transpose();
    const Eigen::Quaterniond e(r);
    return normalized({e.w(), e.x(), e.y(), e.z()});
}

}  // namespace

PixelIntensities model_intensities(const Quaternion& q) noexcept {
    const auto [w, x, y, z] = q;
    return {w * w + z * z, 0.5 + w * y + x * z, 0.5 + y * z - w * x, w * w + x * x, 0.5 + w * z + x * y};
}

double pixel_cost(const Quaternion& candidate, const PixelObservation& obs) noexcept {
    const auto model = model_intensities(candidate);
    double sum = 0.0;
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        const double d = obs[p] - model[p];
        sum += d * d;
    }
    return sum;
}

double pixel_cost(const AxisAngle& candidate, const PixelObservation& obs) noexcept {
    return pixel_cost(quaternion_from_axis_angle(candidate), obs);
}

std::vector<Quaternion> analytic_candidates(const PixelObservation& obs) {
    // Columns of the Poincare-sphere rotation: I_ab = (1 + s_b . R s_a) / 2 with
    // s_L = e_z, s_H = e_x, s_D = e_y.
    Eigen::Vector3d col_z(2.0 * obs[1] - 1.0, 2.0 * obs[2] - 1.0, 2.0 * obs[0] - 1.0);
    const double rxx = 2.0 * obs[3] - 1.0;
    const double ryx = 2.0 * obs[4] - 1.0;
    if (col_z.norm() == 0.0) col_z = Eigen::Vector3d::UnitZ();
    col_z.normalize();
    const double r = std::sqrt(std::max(0.0, 1.0 - rxx * rxx - ryx * ryx));

    std::vector<Quaternion> out;
    for (double sign : {1.0, -1.0}) {
        Eigen::Vector3d col_x(rxx, ryx, sign * r);
        if (col_x.norm() == 0.0) col_x = Eigen::Vector3d::UnitX();
        Eigen::Matrix3d m;
        m.col(0) = col_x;
        m.col(1) = col_z.cross(col_x);
        m.col(2) = col_z;
        out.push_back(quaternion_from_rotation(m));
        if (r == 0.0) break;
    }
    return out;
}

AxisAngle sign_representative(const AxisAngle& p) noexcept {
    Vec3 n = p.axis;
    if (std::abs(n.x) < kSnap) n.x = 0.0;
    if (std::abs(n.y) < kSnap) n.y = 0.0;
    if (std::abs(n.z) < kSnap) n.z = 0.0;
    const double len = n.norm();
    n = len > 0.0 ? Vec3{n.x / len, n.y / len, n.z / len} : Vec3{0.0, 0.0, 1.0};
    const bool flip = n.z < 0.0 || (n.z == 0.0 && (n.x < 0.0 || (n.x == 0.0 && n.y < 0.0)));
    const AxisAngle snapped{p.theta, n};
    return flip ? snapped.negated() : snapped;
}

void MLEConfig::validate() const {
    if (n_starts < 1) throw std::invalid_argument("MLEConfig: n_starts must be at least 1");
    if (max_iters < 0) throw std::invalid_argument("MLEConfig: max_iters must be non-negative");
    if (!(tolerance > 0.0)) throw std::invalid_argument("MLEConfig: tolerance must be positive");
    if (grid_theta < 0 || grid_polar < 0 || grid_azimuth < 0) {
        throw std::invalid_argument("MLEConfig: grid resolution must be non-negative");
    }
}

Quaternion refine_quaternion(Quaternion start, const PixelObservation& obs, int max_iters, double tolerance) {
    Quaternion q = normalized(start);
    double cost = pixel_cost(q, obs);
    double mu = 1e-3;

    for (int iter = 0; iter < max_iters && cost > 1e-30; ++iter) {
        const auto model = model_intensities(q);
        const auto [w, x, y, z] = q;
        // Rows: gradient of each intensity restricted to the unit sphere, 2 M_p q - 2 I_p q.
        const double mq[kMeasurementCount][4] = {
            {2 * w, 0, 0, 2 * z},
            {w + y, x + z, y + w, z + x},
            {w - x, x - w, y + z, z + y},
            {2 * w, 2 * x, 0, 0},
            {w + z, x + y, y + x, z + w},
        };
        Eigen::Matrix<double, kMeasurementCount, 4> jac;
        Eigen::Matrix<double, kMeasurementCount, 1> res;
        const double qv[4] = {w, x, y, z};
        for (std::size_t p = 0; p < kMeasurementCount; ++p) {
            for (int c = 0; c < 4; ++c) jac(p, c) = mq[p][c] - 2.0 * model[p] * qv[c];
            res(p) = model[p] - obs[p];
        }
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d grad = jac.transpose() * res;

        bool accepted = false;
        while (!accepted && mu < 1e10) {
            const Eigen::Vector4d step = (jtj + mu * Eigen::Matrix4d::Identity()).ldlt().solve(-grad);
            const Quaternion trial = normalized({w + step(0), x + step(1), y + step(2), z + step(3)});
            const double trial_cost = pixel_cost(trial, obs);
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double decrease = cost - trial_cost;
                q = trial;
                cost = trial_cost;
                mu = std::max(mu / 3.0, 1e-15);
                accepted = true;
                if (decrease <= tolerance * cost) return q;
            } else {
                mu *= 4.0;
            }
        }
        if (!accepted) break;
    }
    return q;
}

PixelInverter::PixelInverter(const MLEConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    grid_.reserve(static_cast<std::size_t>(cfg.grid_theta) * cfg.grid_polar * cfg.grid_azimuth);
    for (int i = 0; i < cfg.grid_theta; ++i) {
        const double theta = (i + 0.5) * kPi / cfg.grid_theta;
        for (int j = 0; j < cfg.grid_polar; ++j) {
            const double polar = (j + 0.5) * kPi / cfg.grid_polar;
            for (int k = 0; k < cfg.grid_azimuth; ++k) {
                const double azimuth = k * kTwoPi / cfg.grid_azimuth;
                grid_.push_back(quaternion_from_axis_angle({theta, axis_from_spherical({polar, azimuth})}));
            }
        }
    }
}

PixelFit PixelInverter::fit(const PixelObservation& obs) const {
    for (double v : obs) {
        if (!std::isfinite(v)) throw std::invalid_argument("invert_pixel: non-finite observation");
    }

    std::vector<Quaternion> starts = analytic_candidates(obs);

    if (!grid_.empty()) {
        std::vector<double> costs(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) costs[k] = pixel_cost(grid_[k], obs);
        std::vector<std::size_t> order(grid_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        const std::size_t keep = std::min<std::size_t>(order.size(), 16 * static_cast<std::size_t>(cfg_.n_starts));
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                          [&](std::size_t a, std::size_t b) { return costs[a] < costs[b] || (costs[a] == costs[b] && a < b); });
        std::vector<Quaternion> picked;
        for (std::size_t k = 0; k < keep && static_cast<int>(picked.size()) < cfg_.n_starts; ++k) {
            const Quaternion& cand = grid_[order[k]];
            const bool distinct = std::all_of(picked.begin(), picked.end(), [&](const Quaternion& p) {
                return std::abs(qdot(p, cand)) < kStartSeparation;
            });
            if (distinct) picked.push_back(cand);
        }
        starts.insert(starts.end(), picked.begin(), picked.end());
    }

    Quaternion best{};
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        const Quaternion q = refine_quaternion(s, obs, cfg_.max_iters, cfg_.tolerance);
        const double c = pixel_cost(q, obs);
        if (c < best_cost) {
            best_cost = c;
            best = q;
        }
    }
    return {sign_representative(axis_angle_from_quaternion(best)), best_cost};
}

AxisAngle invert_pixel(const PixelObservation& obs, const MLEConfig& cfg) {
    return PixelInverter(cfg).fit(obs).params;
}

}  // namespace polqpt
