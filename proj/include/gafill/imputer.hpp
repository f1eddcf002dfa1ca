#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gafill/autoencoder.hpp"
#include "gafill/data_matrix.hpp"
#include "gafill/ga.hpp"
#include "gafill/pca.hpp"
#include "gafill/schema.hpp"
#include "gafill/svr.hpp"

namespace gafill {

enum class Variant { Annga, Pcannga11, Pcannga10, Svrga };

std::string variant_name(Variant v);
Variant variant_from_string(const std::string& name);

/// A trained recall model the GA searches against. PCANNGA variants pair
/// the autoencoder with the transform whose k matches its dimension;
/// SVRGA carries the per-variable ensemble instead.
struct RecallBackend {
    Variant variant = Variant::Annga;
    AutoencoderModel autoencoder;
    std::optional<PcaTransform> pca;
    SvrEnsemble ensemble;

    /// Schema dimensionality (the original record length d).
    int dimension() const;

    void validate() const;
};

/// One record to complete: normalized values with absent positions zeroed,
/// plus which positions are absent. Known values must lie in [0, 1] and at
/// least one position must be missing.
struct ImputationTask {
    Eigen::VectorXd record;
    std::vector<int> missing_indices;
};

ImputationTask make_task(const Eigen::VectorXd& record,
                         const std::vector<bool>& present);
ImputationTask make_task(const DataMatrix& data, Eigen::Index row);

/// The candidate expressed in the backend's comparison space: the record
/// itself for ANNGA and SVRGA, its component projection for PCANNGA.
Eigen::VectorXd representation(const RecallBackend& backend,
                               const Eigen::VectorXd& candidate);

/// The backend's reconstruction of the candidate, in the same comparison
/// space as representation(). For SVRGA, entry j is model j's prediction
/// from the candidate without column j.
Eigen::VectorXd recall_full(const RecallBackend& backend,
                            const Eigen::VectorXd& candidate);

/// -(squared norm of representation - recall_full) for the record with
/// `genes` substituted at the missing positions. Always <= 0; exact
/// reconstruction gives the global maximum 0.
double fitness(const RecallBackend& backend, const ImputationTask& task,
               const std::vector<double>& genes);

struct RecordImputation {
    Eigen::VectorXd completed_normalized; // continuous genes, pre-rounding
    Eigen::VectorXd completed_raw;        // denormalized, discrete rounding
    double best_fitness = 0.0;
    int generations_run = 0;
};

/// GA over the missing genes in [0,1]; observed positions are never
/// revised. The raw record applies the dataset rounding conventions.
RecordImputation impute_record(const RecallBackend& backend,
                               const ImputationTask& task,
                               const DatasetSchema& schema,
                               const GaConfig& ga_config, std::uint64_t seed);

struct RowDiagnostic {
    long row = 0;
    std::vector<int> missing_indices;
    std::vector<double> imputed_raw; // aligned with missing_indices
    double best_fitness = 0.0;
    int generations_run = 0;
};

struct ImputeOptions {
    GaConfig ga;
    std::uint64_t seed = 0;
    int workers = 1;
    bool trace = false; // per-record GA trace lines for verbose mode
};

struct ImputeResult {
    DataMatrix completed; // normalized, fully observed
    std::vector<RowDiagnostic> diagnostics; // rows that had missing cells
    std::vector<std::string> trace_lines;   // row order, one per generation
};

/// Per-row seeds derive from (seed, row index), so worker count never
/// changes the output.
ImputeResult impute_dataset(const RecallBackend& backend, const DataMatrix& data,
                            const DatasetSchema& schema, const ImputeOptions& options);

void save_backend(const RecallBackend& backend, const std::string& path,
                  const std::string& config_hash, const std::string& prepare_hash);

struct LoadedBackend {
    RecallBackend backend;
    std::string config_hash;
    std::string prepare_hash;
};

LoadedBackend load_backend(const std::string& path);

} // namespace gafill
