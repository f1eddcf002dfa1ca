#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gafill {

enum class VariableKind { Binary, Integer, Continuous };

std::string to_string(VariableKind kind);
VariableKind variable_kind_from_string(const std::string& s);

/// One column of the dataset: name, kind, inclusive range, and an optional
/// ordered category-string -> integer-code table used during CSV ingestion.
struct VariableSpec {
    std::string name;
    VariableKind kind = VariableKind::Continuous;
    double min = 0.0;
    double max = 1.0;
    std::vector<std::pair<std::string, int>> lookup;

    bool is_discrete() const { return kind != VariableKind::Continuous; }

    /// Translates a category string via the lookup table.
    std::optional<int> code_for(const std::string& category) const;

    /// Throws ConfigError on violated invariants (min<max, binary is {0,1},
    /// lookup codes unique and in range).
    void validate() const;
};

/// Ordered variable list; order fixes the column order of every DataMatrix.
struct DatasetSchema {
    std::vector<VariableSpec> variables;

    int dimension() const { return static_cast<int>(variables.size()); }

    /// Column index for a variable name, or -1 when absent.
    int index_of(const std::string& name) const;

    /// Throws ConfigError when names collide or any variable is invalid.
    void validate() const;
};

/// The bundled 11-variable reference schema (HIV survey layout).
DatasetSchema reference_schema();

/// Reads a schema from a JSON file:
///   {"variables": [{"name": ..., "kind": "binary|integer|continuous",
///                   "min": ..., "max": ..., "lookup": {"Gauteng": 1, ...}}]}
/// The lookup block is optional. Throws DataError/ConfigError on problems.
DatasetSchema load_schema(const std::string& path);

/// Writes a schema as JSON (inverse of load_schema).
void save_schema(const DatasetSchema& schema, const std::string& path);

} // namespace gafill
