#pragma once

#include <string>

#include "gafill/config.hpp"

namespace gafill {

// Exit codes shared by the command layer and the executable.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitNothingMissing = 10; // informational, not a failure

int run_synth(const RunConfig& config, long n, const std::string& output_csv);

/// Screens, normalizes, partitions, and writes the four matrix artifacts
/// plus a preparation report into config.out_dir.
int run_prepare(const RunConfig& config, const std::string& input_csv);

/// Trains the configured variant from a prepared directory and writes
/// backend.bin plus a training report.
int run_train(const RunConfig& config, const std::string& prepared_dir);

/// Completes missing cells of a CSV. Observed cells pass through from the
/// input; exit code distinguishes "nothing was missing".
int run_impute(const RunConfig& config, const std::string& backend_path,
               const std::string& input_csv, const std::string& output_csv);

/// Runs the benchmark protocol against the prepared test matrix and writes
/// the human and machine reports.
int run_evaluate(const RunConfig& config, const std::string& backend_path,
                 const std::string& prepared_dir);

} // namespace gafill
