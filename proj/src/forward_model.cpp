#include "polqpt/forward_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "polqpt/parallel.hpp"
#include "polqpt/rng.hpp"

namespace polqpt {

StokesState StokesState::of(Polarization p) noexcept {
    const double r = 1.0 / std::sqrt(2.0);
    switch (p) {
        case Polarization::L:
            return {p, {Complex{1.0}, Complex{0.0}}};
        case Polarization::R:
            return {p, {Complex{0.0}, Complex{1.0}}};
        case Polarization::H:
            return {p, {Complex{r}, Complex{r}}};
        case Polarization::V:
            return {p, {Complex{r}, Complex{-r}}};
        case Polarization::D:
            return {p, {Complex{r}, Complex{0.0, r}}};
        case Polarization::A:
            return {p, {Complex{r}, Complex{0.0, -r}}};
    }
    return {Polarization::L, {Complex{1.0}, Complex{0.0}}};
}

std::string_view to_string(Polarization p) noexcept {
    switch (p) {
        case Polarization::L: return "L";
        case Polarization::R: return "R";
        case Polarization::H: return "H";
        case Polarization::V: return "V";
        case Polarization::D: return "D";
        case Polarization::A: return "A";
    }
    return "?";
}

double projective_intensity(const SU2Matrix& u, const StokesState& a, const StokesState& b) noexcept {
    const Complex out0 = u(0, 0) * a.amplitudes[0] + u(0, 1) * a.amplitudes[1];
    const Complex out1 = u(1, 0) * a.amplitudes[0] + u(1, 1) * a.amplitudes[1];
    return std::norm(std::conj(b.amplitudes[0]) * out0 + std::conj(b.amplitudes[1]) * out1);
}

PixelIntensities pixel_intensities(const SU2Matrix& u) noexcept {
    PixelIntensities out{};
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        out[p] = projective_intensity(u, StokesState::of(kMeasurementPairs[p][0]),
                                      StokesState::of(kMeasurementPairs[p][1]));
    }
    return out;
}

MeasurementStack::MeasurementStack(std::size_t n) : n_pixels(n) {
    for (auto& img : images) img.assign(n * n, 0.0);
}

PixelIntensities MeasurementStack::pixel(std::size_t index) const noexcept {
    PixelIntensities out{};
    for (std::size_t p = 0; p < kMeasurementCount; ++p) out[p] = images[p][index];
    return out;
}

void MeasurementStack::set_pixel(std::size_t index, const PixelIntensities& values) noexcept {
    for (std::size_t p = 0; p < kMeasurementCount; ++p) images[p][index] = values[p];
}

MeasurementStack measurement_stack(const ProcessMap& m, std::size_t threads) {
    MeasurementStack out(m.size());
    parallel_for(m.pixel_count(), threads, [&](std::size_t k) { out.set_pixel(k, pixel_intensities(m.gate(k))); });
    return out;
}

MeasurementStack add_noise(const MeasurementStack& s, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("add_noise: sigma must be non-negative");
    if (s.noisy) throw std::invalid_argument("add_noise: stack is already noisy");
    MeasurementStack out = s;
    out.noisy = true;
    out.sigma = sigma;
    if (sigma == 0.0) return out;
    const std::uint64_t count = s.pixel_count();
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        for (std::size_t k = 0; k < s.pixel_count(); ++k) {
            out.images[p][k] += sigma * counter_normal(seed, p * count + k);
        }
    }
    return out;
}

double polarimetric_infidelity(const MeasurementStack& a, const MeasurementStack& b) {
    if (a.n_pixels != b.n_pixels) {
        throw std::invalid_argument("polarimetric_infidelity: stack sizes differ (" + std::to_string(a.n_pixels) +
                                    " vs " + std::to_string(b.n_pixels) + ")");
    }
    double sum = 0.0;
    for (std::size_t p = 0; p < kMeasurementCount; ++p) {
        for (std::size_t k = 0; k < a.pixel_count(); ++k) {
            const double d = a.images[p][k] - b.images[p][k];
            sum += d * d;
        }
    }
    return sum / (static_cast<double>(kMeasurementCount) * static_cast<double>(a.pixel_count()));
}

}  // namespace polqpt
