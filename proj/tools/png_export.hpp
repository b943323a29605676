#pragma once

#include <filesystem>
#include <span>

namespace polqpt::cli {

/// 8-bit grayscale heatmap of a row-major n x n image. Values are mapped
/// linearly from [lo, hi] to [0, 255] and clamped; the file is for viewing only.
void write_heatmap_png(const std::filesystem::path& file, std::span<const double> values, std::size_t n,
                       double lo = 0.0, double hi = 1.0);

}  // namespace polqpt::cli
