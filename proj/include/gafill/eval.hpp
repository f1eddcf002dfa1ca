#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gafill/data_matrix.hpp"
#include "gafill/ga.hpp"
#include "gafill/imputer.hpp"
#include "gafill/schema.hpp"

namespace gafill {

/// Mean squared error sum((x-y)^2)/n; measured in normalized space before
/// denormalization and rounding.
double mse(const std::vector<double>& truth, const std::vector<double>& imputed);

/// 100 * exact matches / n, on raw values after rounding.
double classification_accuracy(const std::vector<double>& truth,
                               const std::vector<double>& imputed);

/// 100 * |{i : |truth_i - imputed_i| <= tolerance}| / n.
double tolerance_accuracy(const std::vector<double>& truth,
                          const std::vector<double>& imputed, double tolerance);

/// Fixed-point formatting with round-half-up at the last kept digit.
std::string format_fixed(double value, int decimals);

struct VariableResult {
    std::string variable;
    double tolerance = 0.0;
    std::vector<double> run_accuracy; // percent per run
    double average_accuracy = 0.0;
    std::vector<double> run_mse; // normalized space per run
    double average_mse = 0.0;
    long events_per_run = 0;
};

/// One imputation event, retained when the caller asks for pairs.
struct ImputationEvent {
    int run = 0;
    std::string variable;
    double truth_raw = 0.0;
    double imputed_raw = 0.0;
    double truth_normalized = 0.0;
    double imputed_normalized = 0.0;
};

struct EvaluationReport {
    std::string variant;
    int runs = 0;
    long records_per_run = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> run_seeds;
    std::vector<VariableResult> variables;
    std::vector<ImputationEvent> events; // empty unless keep_events
};

/// Completes one amputed record: receives the pool row index it came from,
/// the normalized record with missing positions zeroed, those positions,
/// and a derived seed; returns the full normalized completion.
using RecordCompleter = std::function<Eigen::VectorXd(
    Eigen::Index pool_row, const Eigen::VectorXd& record,
    const std::vector<int>& missing_indices, std::uint64_t seed)>;

struct BenchmarkOptions {
    int runs = 3;
    long records_per_run = 1000;
    std::vector<std::string> target_variables;
    std::map<std::string, double> tolerances; // default 0 per variable
    std::uint64_t seed = 0;
    int workers = 1;
    bool keep_events = false;
};

/// Each run samples records without replacement under a derived seed,
/// removes one target variable per record (cycling through the target list
/// in sample order), imputes, and scores per variable: accuracy on raw
/// rounded values at that variable's tolerance, MSE on normalized values.
EvaluationReport run_benchmark(const RecordCompleter& completer,
                               const DataMatrix& pool, const DatasetSchema& schema,
                               const BenchmarkOptions& options,
                               const std::string& variant_label);

/// Backend-driven variant: wraps impute_record per event.
EvaluationReport run_benchmark(const RecallBackend& backend, const DataMatrix& pool,
                               const DatasetSchema& schema, const GaConfig& ga_config,
                               const BenchmarkOptions& options);

/// Aligned human-readable accuracy and MSE tables.
std::string render_table(const EvaluationReport& report);

/// One JSON object per line: (variant, variable, run, metric, value) rows
/// plus per-variable averages.
std::string render_jsonl(const EvaluationReport& report);

} // namespace gafill
