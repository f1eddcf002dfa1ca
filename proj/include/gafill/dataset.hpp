#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gafill/data_matrix.hpp"
#include "gafill/schema.hpp"

namespace gafill {

/// A cell that could not be interpreted during CSV ingestion (unknown
/// category string or unparseable number). The cell is masked out, not fatal.
struct CellIssue {
    long row = 0; // 0-based data row (header excluded)
    int column = 0;
    std::string content;
    std::string reason;
};

struct LoadResult {
    DataMatrix data;
    std::vector<CellIssue> issues;
};

/// Per-column count of present cells masked out by range screening.
struct OutlierReport {
    std::vector<long> flips_per_column;
    long total() const;
};

struct PartitionResult {
    DataMatrix train;
    DataMatrix validation;
    DataMatrix test;
    DataMatrix impute_pool; // rows that arrived incomplete, original order
};

struct AmputeResult {
    DataMatrix amputed;
    DataMatrix ground_truth; // fully observed copy of the input
};

/// Parses a CSV file (one header row, comma delimiter, UTF-8; empty cell =
/// missing) into a raw-space DataMatrix. Header names must match the schema
/// in order. Category strings are translated through each variable's lookup
/// table; unknown categories and unparseable numbers become masked cells and
/// are reported in LoadResult::issues.
LoadResult load_csv(const std::string& path, const DatasetSchema& schema);

/// Writes a DataMatrix as CSV with the schema's header row. Masked cells are
/// written as empty strings. Number formatting round-trips doubles exactly.
void save_csv(const DataMatrix& data, const DatasetSchema& schema,
              const std::string& path);

/// Masks out any present cell outside its variable's inclusive [min, max]
/// range. Rows are kept; only the offending cells flip to missing.
std::pair<DataMatrix, OutlierReport>
screen_outliers(const DataMatrix& data, const DatasetSchema& schema);

/// Maps each present cell v to (v - min)/(max - min) using the schema range.
/// Requires raw space with all present values in range (screen first).
DataMatrix normalize(const DataMatrix& data, const DatasetSchema& schema);

/// Inverse affine map per column; integer/binary variables are rounded
/// half-up to the nearest integer and clamped into range.
DataMatrix denormalize(const DataMatrix& data, const DatasetSchema& schema);

/// Scalar form of the same mapping for one variable.
double denormalize_value(double normalized, const VariableSpec& variable);

struct PartitionFractions {
    double train = 0.60;
    double validation = 0.15;
    double test = 0.25;
};

/// Splits complete rows into train/validation/test by a seeded shuffle;
/// incomplete rows are routed to the impute pool. Sizes are floor(n*f) with
/// remainder rows joining training.
PartitionResult partition(const DataMatrix& data,
                          const PartitionFractions& fractions,
                          std::uint64_t seed);

/// Removes per_row_count values per row, chosen uniformly among the target
/// columns (MCAR), returning the amputed matrix and the untouched original.
AmputeResult ampute(const DataMatrix& data, const DatasetSchema& schema,
                    const std::vector<std::string>& target_variables,
                    int per_row_count, std::uint64_t seed);

/// Generates n schema-valid records. Each record consumes one uniform draw
/// u_j per variable, in schema order. Every variable except Gravidity,
/// Parity, and HIV Status is independent uniform over its range
/// (continuous: min + u(max-min); discrete: uniform over the integers).
/// With age_t and edu_t the range positions of Age Group and Education in
/// [0,1], the dependent chain is the fixed rule set
///   Gravidity  = clamp(round(max_g * age_t - 0.5 + u), min_g, max_g)
///   Parity     = clamp(round(Gravidity * (0.5 + 0.5 u)), min_p, max_p)
///   HIV Status = [0.5 age_t + 0.5 (1 - edu_t) + 0.04 (u - 0.5) > 0.47]
/// so parity never exceeds gravidity. The constants are properties of the
/// generator, not configuration. Missing schema columns degrade gracefully:
/// a dependent variable whose parents are absent falls back to uniform.
DataMatrix synthesize(const DatasetSchema& schema, long n, std::uint64_t seed);

} // namespace gafill
