// Per-pixel genetic baseline. Deliberately uses no information from
// neighbouring pixels.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "polqpt/parallel.hpp"
#include "polqpt/reconstruct.hpp"
#include "polqpt/rng.hpp"

namespace polqpt {

namespace {

// (theta, polar, azimuth)
using Genome = std::array<double, 3>;

constexpr double kBlendAlpha = 0.5;

double wrap(double v, double period) {
    v = std::fmod(v, period);
    if (v < 0.0) v += period;
    return v >= period ? 0.0 : v;
}

// Maps a genome onto the representative of its equivalence class without
// changing the cost: theta has period pi (U and -U give the same images) and
// (polar, azimuth) ~ (-polar, azimuth + pi) ~ (2pi - polar, azimuth + pi).
Genome repair(Genome g) {
    g[0] = wrap(g[0], kPi);
    g[1] = wrap(g[1], kTwoPi);
    if (g[1] > kPi) {
        g[1] = kTwoPi - g[1];
        g[2] += kPi;
    }
    g[2] = wrap(g[2], kTwoPi);
    return g;
}

// Nearest image of b's periodic coordinates relative to a, so that blending
// interpolates along the short arc.
Genome align(const Genome& a, Genome b) {
    for (std::size_t d : {0u, 2u}) {
        const double period = d == 0 ? kPi : kTwoPi;
        b[d] = a[d] + std::remainder(b[d] - a[d], period);
    }
    return b;
}

AxisAngle to_axis_angle(const Genome& g) { return {g[0], axis_from_spherical({g[1], g[2]})}; }

double genome_cost(const Genome& g, const PixelObservation& obs) { return pixel_cost(to_axis_angle(g), obs); }

std::size_t tournament(const std::vector<double>& costs, int size, Rng& rng) {
    const int count = static_cast<int>(costs.size());
    auto best = static_cast<std::size_t>(rng.uniform_int(0, count - 1));
    for (int t = 1; t < size; ++t) {
        const auto c = static_cast<std::size_t>(rng.uniform_int(0, count - 1));
        if (costs[c] < costs[best]) best = c;
    }
    return best;
}

}  // namespace

void GAConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("GAConfig: population_size must be at least 2");
    if (generations < 0) throw std::invalid_argument("GAConfig: generations must be non-negative");
    if (tournament_size < 1) throw std::invalid_argument("GAConfig: tournament_size must be at least 1");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
        throw std::invalid_argument("GAConfig: crossover_rate must lie in [0, 1]");
    }
    if (!(mutation_std >= 0.0)) throw std::invalid_argument("GAConfig: mutation_std must be non-negative");
    if (!(mutation_decay > 0.0 && mutation_decay <= 1.0)) {
        throw std::invalid_argument("GAConfig: mutation_decay must lie in (0, 1]");
    }
    if (elitism_count < 0 || elitism_count >= population_size) {
        throw std::invalid_argument("GAConfig: elitism_count must lie in [0, population_size)");
    }
}

GAResult ga_optimize_pixel(const PixelObservation& obs, const GAConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    const auto pop_size = static_cast<std::size_t>(cfg.population_size);

    std::vector<Genome> pop(pop_size);
    for (auto& g : pop) g = {rng.uniform(0.0, kPi), rng.uniform(0.0, kPi), rng.uniform(0.0, kTwoPi)};
    std::vector<double> costs(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) costs[i] = genome_cost(pop[i], obs);

    std::vector<std::size_t> order(pop_size);
    auto rank = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    };

    GAResult result;
    result.best_cost_per_generation.reserve(static_cast<std::size_t>(cfg.generations));
    std::vector<Genome> next(pop_size);
    std::vector<double> next_costs(pop_size);

    for (int gen = 0; gen < cfg.generations; ++gen) {
        rank();
        const double progress = cfg.generations > 1 ? static_cast<double>(gen) / (cfg.generations - 1) : 0.0;
        const double step = cfg.mutation_std * std::pow(cfg.mutation_decay, progress);

        std::size_t filled = 0;
        for (; filled < static_cast<std::size_t>(cfg.elitism_count); ++filled) {
            next[filled] = pop[order[filled]];
            next_costs[filled] = costs[order[filled]];
        }
        for (; filled < pop_size; ++filled) {
            const Genome& a = pop[tournament(costs, cfg.tournament_size, rng)];
            const Genome b = align(a, pop[tournament(costs, cfg.tournament_size, rng)]);
            Genome child = a;
            if (rng.bernoulli(cfg.crossover_rate)) {
                for (std::size_t d = 0; d < 3; ++d) {
                    const double lo = std::min(a[d], b[d]);
                    const double hi = std::max(a[d], b[d]);
                    const double ext = kBlendAlpha * (hi - lo);
                    child[d] = rng.uniform(lo - ext, hi + ext);
                }
            }
            for (double& v : child) v += step * rng.normal();
            next[filled] = repair(child);
            next_costs[filled] = genome_cost(next[filled], obs);
        }
        pop.swap(next);
        costs.swap(next_costs);
        result.best_cost_per_generation.push_back(*std::min_element(costs.begin(), costs.end()));
    }

    rank();
    result.best = to_axis_angle(pop[order.front()]);
    result.best_cost = costs[order.front()];
    return result;
}

ProcessMap reconstruct_map_ga(const MeasurementStack& stack, const GAConfig& cfg) {
    cfg.validate();
    if (stack.n_pixels == 0) throw std::invalid_argument("reconstruct_map_ga: empty stack");
    std::vector<AxisAngle> params(stack.pixel_count());
    parallel_for(params.size(), cfg.threads, [&](std::size_t k) {
        params[k] = ga_optimize_pixel(stack.pixel(k), cfg, derive_seed(cfg.rng_seed, k)).best;
    });
    ProcessMap raw(stack.n_pixels, std::move(params));
    return cfg.stitch ? stitch_signs(raw) : canonicalize_sign(std::move(raw));
}

}  // namespace polqpt
