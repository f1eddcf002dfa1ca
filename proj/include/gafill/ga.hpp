#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gafill/rng.hpp"

namespace gafill {

struct GaConfig {
    int population_size = 50;
    int generations = 50;
    double selection_q = 0.08; // probability weight of the top rank
    double mutation_b = 3.0;   // non-uniformity shape exponent
    // Per-generation operator budget; -1 means floor(0.6 P) children and
    // floor(0.1 P) mutants. Elitism always carries the single best.
    int crossover_count = -1;
    int mutation_count = -1;
    std::uint64_t seed = 0;
};

struct GeneBounds {
    double low;
    double high;
};

struct Individual {
    std::vector<double> genes;
    double fitness = 0.0;
};

struct GaTracePoint {
    int generation;
    double best_fitness;
    double mean_fitness;
};

struct GaResult {
    Individual best;
    std::vector<double> history; // best fitness: initial + per generation
    std::vector<GaTracePoint> trace;
};

using FitnessFn = std::function<double(const std::vector<double>&)>;

/// Samples an index by normalized geometric ranking: after a stable sort
/// by descending fitness, rank r is drawn with probability
/// q' (1-q)^(r-1), q' = q / (1 - (1-q)^P). Returns the index into the
/// original population vector.
std::size_t normalized_geometric_select(const std::vector<Individual>& population,
                                        double q, Rng& rng);

/// Single cut point drawn from 1..len-1; tails exchanged. Length-1 parents
/// come back unchanged.
std::pair<Individual, Individual> simple_crossover(const Individual& a,
                                                   const Individual& b, Rng& rng);

/// Perturbs one random gene toward a coin-flipped bound by
/// delta = y (1 - u^((1-g/G)^b)), y the distance to that bound.
Individual nonuniform_mutate(const Individual& x, int generation,
                             int max_generations, double b,
                             const std::vector<GeneBounds>& bounds, Rng& rng);

/// Maximizes fitness. Initial population is uniform within bounds, after
/// any injected candidates (which displace random initials). Non-finite
/// fitness values are demoted to the lowest representable double so the
/// individual is effectively never selected and cannot become the best.
GaResult run_ga(const FitnessFn& fitness, const std::vector<GeneBounds>& bounds,
                const GaConfig& config,
                const std::vector<std::vector<double>>& initial_injections = {});

} // namespace gafill
