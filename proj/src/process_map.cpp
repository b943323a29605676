#include "polqpt/process_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polqpt {

ProcessMap::ProcessMap(std::size_t n) : n_(n), params_(n * n) {
    if (n == 0) throw std::invalid_argument("ProcessMap: side length must be positive");
}

ProcessMap::ProcessMap(std::size_t n, std::vector<AxisAngle> params, bool canonicalized)
    : n_(n), params_(std::move(params)), canonicalized_(canonicalized) {
    if (n == 0) throw std::invalid_argument("ProcessMap: side length must be positive");
    if (params_.size() != n * n) {
        throw std::invalid_argument("ProcessMap: expected " + std::to_string(n * n) + " pixels, got " +
                                    std::to_string(params_.size()));
    }
    for (std::size_t k = 0; k < params_.size(); ++k) {
        if (!params_[k].is_valid()) {
            throw std::invalid_argument("ProcessMap: invalid axis-angle at pixel (" + std::to_string(k / n) +
                                        ", " + std::to_string(k % n) + ")");
        }
    }
    if (canonicalized_ && params_.front().axis.z < 0.0) {
        throw std::invalid_argument("ProcessMap: canonicalized map has negative first-pixel n_z");
    }
}

ProcessMap ProcessMap::uniform(std::size_t n, const AxisAngle& p) {
    return ProcessMap(n, std::vector<AxisAngle>(n * n, p));
}

ProcessMap ProcessMap::negated() const {
    ProcessMap out = *this;
    for (auto& p : out.params_) p = p.negated();
    out.canonicalized_ = false;
    return out;
}

bool ProcessMap::is_valid() const noexcept {
    if (n_ == 0 || params_.size() != n_ * n_) return false;
    if (!std::all_of(params_.begin(), params_.end(), [](const AxisAngle& p) { return p.is_valid(); })) {
        return false;
    }
    return !canonicalized_ || params_.front().axis.z >= 0.0;
}

ProcessMap canonicalize_sign(ProcessMap m) {
    if (m.pixel_count() > 0 && m[0].axis.z < 0.0) m = m.negated();
    m.set_canonicalized(true);
    return m;
}

namespace {

void require_same_size(const ProcessMap& a, const ProcessMap& b, const char* what) {
    if (a.size() != b.size() || a.pixel_count() != b.pixel_count()) {
        throw std::invalid_argument(std::string(what) + ": map sizes differ (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
}

}  // namespace

double map_fidelity(const ProcessMap& a, const ProcessMap& b) {
    require_same_size(a, b, "map_fidelity");
    Complex sum{0.0};
    for (std::size_t k = 0; k < a.pixel_count(); ++k) sum += trace_overlap(a.gate(k), b.gate(k));
    return std::min(1.0, std::abs(sum) / (2.0 * static_cast<double>(a.pixel_count())));
}

double pixel_fidelity(const ProcessMap& a, const ProcessMap& b) {
    require_same_size(a, b, "pixel_fidelity");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.pixel_count(); ++k) sum += std::abs(trace_overlap(a.gate(k), b.gate(k)));
    return std::min(1.0, sum / (2.0 * static_cast<double>(a.pixel_count())));
}

}  // namespace polqpt
