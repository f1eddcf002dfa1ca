#include "gafill/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gafill/errors.hpp"

namespace gafill {

namespace {

// Sentinel for individuals whose fitness evaluation failed or returned a
// non-finite value. Finite, so ranking still works; low enough that such
// an individual can never win.
constexpr double kFailedFitness = std::numeric_limits<double>::lowest();

void check_config(const GaConfig& c) {
    if (c.population_size < 2)
        throw ConfigError("population size must be at least 2");
    if (c.generations < 1)
        throw ConfigError("generation count must be at least 1");
    if (!(c.selection_q > 0.0 && c.selection_q < 1.0))
        throw ConfigError("selection q must lie strictly between 0 and 1");
    if (!(c.mutation_b > 0.0))
        throw ConfigError("mutation shape b must be positive");
}

void check_bounds(const std::vector<GeneBounds>& bounds) {
    if (bounds.empty())
        throw ConfigError("gene bounds must be nonempty");
    for (const auto& b : bounds)
        if (!(std::isfinite(b.low) && std::isfinite(b.high) && b.low < b.high))
            throw ConfigError("each gene needs finite bounds with low < high");
}

double safe_eval(const FitnessFn& fitness, const std::vector<double>& genes) {
    double f;
    try {
        f = fitness(genes);
    } catch (...) {
        return kFailedFitness;
    }
    return std::isfinite(f) ? f : kFailedFitness;
}

// Indices of the population sorted by descending fitness, stable so equal
// fitnesses keep their original order.
std::vector<std::size_t> ranking(const std::vector<Individual>& population) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return population[a].fitness > population[b].fitness;
                     });
    return order;
}

} // namespace

std::size_t normalized_geometric_select(const std::vector<Individual>& population,
                                        double q, Rng& rng) {
    const std::size_t P = population.size();
    if (P == 0)
        throw ConfigError("cannot select from an empty population");
    if (!(q > 0.0 && q < 1.0))
        throw ConfigError("selection q must lie strictly between 0 and 1");

    std::vector<std::size_t> order = ranking(population);

    // P(rank r) = q' (1-q)^(r-1), q' = q / (1 - (1-q)^P); sample by
    // walking the cumulative sum.
    const double q_norm = q / (1.0 - std::pow(1.0 - q, static_cast<double>(P)));
    double u = rng.uniform();
    double cumulative = 0.0;
    double term = q_norm;
    for (std::size_t r = 0; r < P; ++r) {
        cumulative += term;
        if (u < cumulative) return order[r];
        term *= 1.0 - q;
    }
    return order[P - 1]; // guards rounding at u ~ 1
}

std::pair<Individual, Individual> simple_crossover(const Individual& a,
                                                   const Individual& b, Rng& rng) {
    if (a.genes.size() != b.genes.size())
        throw DataError("crossover parents must have equal gene counts");
    const std::size_t len = a.genes.size();
    if (len == 0)
        throw DataError("crossover parents must have at least one gene");

    Individual c1 = a, c2 = b;
    if (len == 1) return {c1, c2}; // no interior cut point exists

    // Cut index in 1..len-1; positions >= cut are exchanged.
    std::size_t cut = 1 + rng.uniform_int(len - 1);
    for (std::size_t i = cut; i < len; ++i)
        std::swap(c1.genes[i], c2.genes[i]);
    return {c1, c2};
}

Individual nonuniform_mutate(const Individual& x, int generation,
                             int max_generations, double b,
                             const std::vector<GeneBounds>& bounds, Rng& rng) {
    if (bounds.size() != x.genes.size())
        throw DataError("bounds count must match gene count");
    if (generation < 0 || generation > max_generations)
        throw ConfigError("generation index must lie in 0..max_generations");

    Individual out = x;
    std::size_t i = rng.uniform_int(x.genes.size());
    bool toward_high = rng.coin();
    double u = rng.uniform();

    double y = toward_high ? bounds[i].high - out.genes[i]
                           : out.genes[i] - bounds[i].low;
    double anneal = std::pow(1.0 - static_cast<double>(generation) /
                                       static_cast<double>(max_generations),
                             b);
    double delta = y * (1.0 - std::pow(u, anneal));
    out.genes[i] += toward_high ? delta : -delta;
    out.genes[i] = std::clamp(out.genes[i], bounds[i].low, bounds[i].high);
    return out;
}

GaResult run_ga(const FitnessFn& fitness, const std::vector<GeneBounds>& bounds,
                const GaConfig& config,
                const std::vector<std::vector<double>>& initial_injections) {
    check_config(config);
    check_bounds(bounds);

    const std::size_t P = static_cast<std::size_t>(config.population_size);
    const int G = config.generations;
    std::size_t n_cross = config.crossover_count >= 0
                              ? static_cast<std::size_t>(config.crossover_count)
                              : static_cast<std::size_t>(0.6 * P);
    std::size_t n_mut = config.mutation_count >= 0
                            ? static_cast<std::size_t>(config.mutation_count)
                            : static_cast<std::size_t>(0.1 * P);
    n_cross = std::min(n_cross, P - 1);
    n_mut = std::min(n_mut, P - 1 - n_cross);

    Rng rng(config.seed);

    auto random_individual = [&]() {
        Individual ind;
        ind.genes.resize(bounds.size());
        for (std::size_t i = 0; i < bounds.size(); ++i)
            ind.genes[i] = rng.uniform(bounds[i].low, bounds[i].high);
        return ind;
    };

    std::vector<Individual> population;
    population.reserve(P);
    for (const auto& genes : initial_injections) {
        if (population.size() == P) break;
        if (genes.size() != bounds.size())
            throw ConfigError("injected candidate has the wrong gene count");
        Individual ind;
        ind.genes = genes;
        for (std::size_t i = 0; i < bounds.size(); ++i)
            ind.genes[i] = std::clamp(ind.genes[i], bounds[i].low, bounds[i].high);
        population.push_back(std::move(ind));
    }
    while (population.size() < P) population.push_back(random_individual());

    for (auto& ind : population) ind.fitness = safe_eval(fitness, ind.genes);

    auto best_index = [&]() {
        std::size_t best = 0;
        for (std::size_t i = 1; i < population.size(); ++i)
            if (population[i].fitness > population[best].fitness) best = i;
        return best;
    };
    auto mean_fitness = [&]() {
        double sum = 0.0;
        long count = 0;
        for (const auto& ind : population)
            if (ind.fitness != kFailedFitness) {
                sum += ind.fitness;
                ++count;
            }
        return count ? sum / count : kFailedFitness;
    };

    GaResult result;
    result.best = population[best_index()];
    result.history.push_back(result.best.fitness);
    result.trace.push_back({0, result.best.fitness, mean_fitness()});

    for (int g = 1; g <= G; ++g) {
        std::vector<Individual> next;
        next.reserve(P);
        next.push_back(population[best_index()]); // elitism

        std::size_t produced = 0;
        while (produced < n_cross) {
            const Individual& pa =
                population[normalized_geometric_select(population,
                                                       config.selection_q, rng)];
            const Individual& pb =
                population[normalized_geometric_select(population,
                                                       config.selection_q, rng)];
            auto [c1, c2] = simple_crossover(pa, pb, rng);
            c1.fitness = safe_eval(fitness, c1.genes);
            next.push_back(std::move(c1));
            ++produced;
            if (produced < n_cross) {
                c2.fitness = safe_eval(fitness, c2.genes);
                next.push_back(std::move(c2));
                ++produced;
            }
        }
        for (std::size_t m = 0; m < n_mut; ++m) {
            const Individual& src =
                population[normalized_geometric_select(population,
                                                       config.selection_q, rng)];
            Individual mutant =
                nonuniform_mutate(src, g, G, config.mutation_b, bounds, rng);
            mutant.fitness = safe_eval(fitness, mutant.genes);
            next.push_back(std::move(mutant));
        }
        while (next.size() < P) {
            next.push_back(population[normalized_geometric_select(
                population, config.selection_q, rng)]);
        }

        population = std::move(next);
        std::size_t best = best_index();
        if (population[best].fitness > result.best.fitness)
            result.best = population[best];
        result.history.push_back(result.best.fitness);
        result.trace.push_back({g, result.best.fitness, mean_fitness()});
    }

    if (result.best.fitness == kFailedFitness)
        throw NumericError("every candidate's fitness evaluation failed");
    return result;
}

} // namespace gafill
