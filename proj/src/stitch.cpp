#include <cmath>
#include <deque>
#include <queue>
#include <tuple>
#include <vector>

#include "polqpt/reconstruct.hpp"

namespace polqpt {

namespace {

constexpr double kUnresolvedSin = 1e-4;
// Weight of the parameter-continuity term relative to the gate overlap.
constexpr double kParamWeight = 0.1;

template <typename Fn>
void for_each_neighbour(std::size_t index, std::size_t n, Fn&& fn) {
    const std::size_t row = index / n;
    const std::size_t col = index % n;
    if (row > 0) fn(index - n);
    if (col > 0) fn(index - 1);
    if (col + 1 < n) fn(index + 1);
    if (row + 1 < n) fn(index + n);
}

// Pixels whose rotation angle is too close to 0 or pi carry no axis
// information; give them the axis of the nearest resolved pixel (BFS order).
std::vector<AxisAngle> fill_unresolved_axes(const ProcessMap& raw) {
    const std::size_t n = raw.size();
    std::vector<AxisAngle> params = raw.params();
    std::vector<bool> resolved(params.size());
    std::deque<std::size_t> frontier;
    for (std::size_t k = 0; k < params.size(); ++k) {
        resolved[k] = std::sin(params[k].theta) >= kUnresolvedSin;
        if (resolved[k]) frontier.push_back(k);
    }
    while (!frontier.empty()) {
        const std::size_t k = frontier.front();
        frontier.pop_front();
        for_each_neighbour(k, n, [&](std::size_t nb) {
            if (resolved[nb]) return;
            params[nb].axis = params[k].axis;
            resolved[nb] = true;
            frontier.push_back(nb);
        });
    }
    return params;
}

}  // namespace

ProcessMap stitch_signs(const ProcessMap& raw) {
    const std::size_t n = raw.size();
    std::vector<AxisAngle> params = fill_unresolved_axes(raw);
    std::vector<Quaternion> quats(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) quats[k] = quaternion_from_axis_angle(params[k]);

    // Positive when a and b agree in sign. The first term is Re Tr(U_a^dagger U_b) / 2.
    // The second compares (theta, n) against (pi - theta, -n): the rotation angle
    // field stays continuous where the gate overlap alone changes sign between
    // neighbours.
    auto agreement = [&](std::size_t a, std::size_t b) {
        const Quaternion& p = quats[a];
        const Quaternion& q = quats[b];
        const double gate = p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
        const double angle = (kPi - 2.0 * params[a].theta) * (kPi - 2.0 * params[b].theta);
        return gate + kParamWeight * (angle + 4.0 * dot(params[a].axis, params[b].axis));
    };

    std::vector<int> sign(params.size(), 0);
    // Max-heap on confidence |score|; ties go to the lower pixel index.
    using Entry = std::tuple<double, std::size_t>;
    auto cmp = [](const Entry& a, const Entry& b) {
        return std::get<0>(a) < std::get<0>(b) || (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) > std::get<1>(b));
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

    auto assign = [&](std::size_t k, int s) {
        sign[k] = s;
        for_each_neighbour(k, n, [&](std::size_t nb) {
            if (sign[nb] == 0) heap.emplace(std::abs(agreement(k, nb)), nb);
        });
    };

    assign(0, 1);
    while (!heap.empty()) {
        const std::size_t k = std::get<1>(heap.top());
        heap.pop();
        if (sign[k] != 0) continue;
        int agree = 0;
        int disagree = 0;
        double weighted = 0.0;
        for_each_neighbour(k, n, [&](std::size_t nb) {
            if (sign[nb] == 0) return;
            const double v = sign[nb] * agreement(nb, k);
            weighted += v;
            if (v > 0.0) ++agree;
            if (v < 0.0) ++disagree;
        });
        const bool flip = disagree > agree || (disagree == agree && weighted < 0.0);
        assign(k, flip ? -1 : 1);
    }

    for (std::size_t k = 0; k < params.size(); ++k) {
        if (sign[k] < 0) params[k] = params[k].negated();
    }
    return canonicalize_sign(ProcessMap(n, std::move(params)));
}

}  // namespace polqpt
