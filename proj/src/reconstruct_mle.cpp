#include <cmath>
#include <stdexcept>
#include <string>

#include "polqpt/parallel.hpp"
#include "polqpt/reconstruct.hpp"

namespace polqpt {

namespace {

void require_finite(const MeasurementStack& stack) {
    const std::size_t n = stack.n_pixels;
    for (std::size_t k = 0; k < stack.pixel_count(); ++k) {
        for (std::size_t p = 0; p < kMeasurementCount; ++p) {
            if (!std::isfinite(stack.images[p][k])) {
                throw std::invalid_argument("reconstruct: non-finite I_" + std::string(kMeasurementNames[p]) +
                                            " at pixel (row " + std::to_string(k / n) + ", col " +
                                            std::to_string(k % n) + ")");
            }
        }
    }
}

}  // namespace

ProcessMap reconstruct_map_mle(const MeasurementStack& stack, const MLEConfig& cfg) {
    if (stack.n_pixels == 0) throw std::invalid_argument("reconstruct_map_mle: empty stack");
    require_finite(stack);
    const PixelInverter inverter(cfg);
    std::vector<AxisAngle> params(stack.pixel_count());
    parallel_for(params.size(), cfg.threads, [&](std::size_t k) { params[k] = inverter.fit(stack.pixel(k)).params; });
    return stitch_signs(ProcessMap(stack.n_pixels, std::move(params)));
}

}  // namespace polqpt
