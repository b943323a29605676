#include "png_export.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace polqpt::cli {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};

}  // namespace

void write_heatmap_png(const std::filesystem::path& file, std::span<const double> values, std::size_t n, double lo,
                       double hi) {
    if (values.size() != n * n || n == 0) throw std::invalid_argument("write_heatmap_png: image is not n x n");
    if (!(hi > lo)) throw std::invalid_argument("write_heatmap_png: empty value range");

    std::vector<png_byte> pixels(values.size());
    std::transform(values.begin(), values.end(), pixels.begin(), [&](double v) {
        const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
        return static_cast<png_byte>(std::lround(t * 255.0));
    });

    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(file.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open " + file.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng failed writing " + file.string());
    }
    png_init_io(png, fp.get());
    const auto side = static_cast<png_uint_32>(n);
    png_set_IHDR(png, info, side, side, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t row = 0; row < n; ++row) png_write_row(png, pixels.data() + row * n);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(fp.get()) != 0) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace polqpt::cli
