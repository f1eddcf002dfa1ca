#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gafill {

/// Effective settings for a pipeline run. Every field has a default that
/// matches the reference configuration; JSON config files may override any
/// subset, and unknown keys are an error.
struct RunConfig {
    std::string schema_path; // empty = built-in reference schema

    std::string variant = "ANNGA";

    // Recall-network training. hidden_count and pca_k of -1 resolve to the
    // variant defaults: ANNGA 10/-, PCANNGA-11 10/11, PCANNGA-10 9/10.
    int hidden_count = -1;
    int max_cycles = 1000;
    int patience = 50;
    int pca_k = -1;

    // Per-variable regressor tuning.
    double svr_width_low = 1e-2;
    double svr_width_high = 1e2;
    double svr_reg_low = 1e-2;
    double svr_reg_high = 1e6;
    long svr_subsample = 3000;
    int svr_tune_population = 16;
    int svr_tune_generations = 12;

    // Search over missing values.
    int ga_population = 50;
    int ga_generations = 50;
    double ga_selection_q = 0.08;
    double ga_mutation_b = 3.0;
    int ga_crossover_count = -1;
    int ga_mutation_count = -1;

    std::uint64_t seed = 1;

    double train_fraction = 0.60;
    double validation_fraction = 0.15;
    double test_fraction = 0.25;

    std::vector<std::string> target_variables = {
        "HIV Status", "Education", "Age Group", "Gravidity", "Parity"};
    std::map<std::string, double> tolerances = {{"Education", 1.0},
                                                {"Age Group", 1.0}};

    int runs = 3;
    long records_per_run = 1000;

    // Process-level settings; excluded from the config hash because they
    // cannot change results.
    std::string out_dir = ".";
    int workers = 0; // 0 = available parallelism
    bool verbose = false;

    int resolved_hidden_count() const;
    int resolved_pca_k() const;
    void validate() const;
};

RunConfig load_config(const std::string& path);

/// Parses config text (same rules as load_config). `source` names the
/// origin for error messages.
RunConfig parse_config(const std::string& text, const std::string& source);

/// Canonical JSON echo of the result-affecting fields.
std::string config_json(const RunConfig& config);

/// Hex digest of config_json; artifacts carry it so stale mixes of
/// prepared data and models are detected.
std::string config_hash(const RunConfig& config);

} // namespace gafill
