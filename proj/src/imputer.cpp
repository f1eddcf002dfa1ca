#include "gafill/imputer.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <json.hpp>

#include "gafill/dataset.hpp"
#include "gafill/errors.hpp"
#include "gafill/serialize.hpp"

namespace gafill {

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::Annga: return "ANNGA";
    case Variant::Pcannga11: return "PCANNGA-11";
    case Variant::Pcannga10: return "PCANNGA-10";
    case Variant::Svrga: return "SVRGA";
    }
    throw ConfigError("unknown variant tag");
}

Variant variant_from_string(const std::string& name) {
    if (name == "ANNGA") return Variant::Annga;
    if (name == "PCANNGA-11") return Variant::Pcannga11;
    if (name == "PCANNGA-10") return Variant::Pcannga10;
    if (name == "SVRGA") return Variant::Svrga;
    throw ConfigError("unknown variant '" + name +
                      "' (expected ANNGA, PCANNGA-11, PCANNGA-10, or SVRGA)");
}

int RecallBackend::dimension() const {
    switch (variant) {
    case Variant::Annga: return autoencoder.dimension();
    case Variant::Pcannga11:
    case Variant::Pcannga10: return pca ? pca->input_dimension() : 0;
    case Variant::Svrga: return ensemble.dimension();
    }
    return 0;
}

void RecallBackend::validate() const {
    switch (variant) {
    case Variant::Annga:
        if (autoencoder.training_space != TrainingSpace::Identity)
            throw ConfigError("ANNGA backend must recall records directly");
        break;
    case Variant::Pcannga11:
    case Variant::Pcannga10: {
        if (!pca)
            throw ConfigError(variant_name(variant) +
                              " backend needs a component transform");
        if (autoencoder.training_space != TrainingSpace::PcaTransformed)
            throw ConfigError(variant_name(variant) +
                              " backend must recall component projections");
        if (pca->k() != autoencoder.dimension())
            throw ConfigError("component count " + std::to_string(pca->k()) +
                              " does not match the recall network width " +
                              std::to_string(autoencoder.dimension()));
        break;
    }
    case Variant::Svrga: {
        const int d = ensemble.dimension();
        if (d < 2)
            throw ConfigError("SVRGA backend needs at least two per-variable models");
        for (int j = 0; j < d; ++j) {
            const SvrModel& m = ensemble.models[j];
            if (m.target_variable != j)
                throw ConfigError("ensemble model order does not cover the schema");
            if (m.support_inputs.cols() != d - 1)
                throw ConfigError("ensemble model " + std::to_string(j) +
                                  " has feature width " +
                                  std::to_string(m.support_inputs.cols()) +
                                  ", expected " + std::to_string(d - 1));
        }
        break;
    }
    }
}

ImputationTask make_task(const Eigen::VectorXd& record,
                         const std::vector<bool>& present) {
    if (static_cast<std::size_t>(record.size()) != present.size())
        throw DataError("record length and presence mask length differ");

    ImputationTask task;
    task.record = record;
    for (int j = 0; j < record.size(); ++j) {
        if (!present[j]) {
            task.missing_indices.push_back(j);
            task.record(j) = 0.0;
        } else if (record(j) < 0.0 || record(j) > 1.0) {
            throw DataError("known value at position " + std::to_string(j) +
                            " lies outside [0,1]; normalize first");
        }
    }
    if (task.missing_indices.empty())
        throw DataError("task has no missing positions");
    return task;
}

ImputationTask make_task(const DataMatrix& data, Eigen::Index row) {
    if (row < 0 || row >= data.rows())
        throw DataError("row index out of range");
    std::vector<bool> present(data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) present[j] = data.mask(row, j);
    return make_task(data.values.row(row).transpose(), present);
}

Eigen::VectorXd representation(const RecallBackend& backend,
                               const Eigen::VectorXd& candidate) {
    switch (backend.variant) {
    case Variant::Annga:
    case Variant::Svrga: return candidate;
    case Variant::Pcannga11:
    case Variant::Pcannga10: return backend.pca->transform(candidate);
    }
    throw ConfigError("unknown variant tag");
}

Eigen::VectorXd recall_full(const RecallBackend& backend,
                            const Eigen::VectorXd& candidate) {
    if (candidate.size() != backend.dimension())
        throw DataError("candidate length " + std::to_string(candidate.size()) +
                        " does not match the backend dimension " +
                        std::to_string(backend.dimension()));
    switch (backend.variant) {
    case Variant::Annga:
        return recall(backend.autoencoder, candidate);
    case Variant::Pcannga11:
    case Variant::Pcannga10:
        return forward(backend.autoencoder.core, backend.pca->transform(candidate));
    case Variant::Svrga: {
        const Eigen::Index d = candidate.size();
        Eigen::VectorXd out(d);
        Eigen::VectorXd reduced(d - 1);
        for (Eigen::Index j = 0; j < d; ++j) {
            reduced.head(j) = candidate.head(j);
            reduced.tail(d - 1 - j) = candidate.tail(d - 1 - j);
            out(j) = predict(backend.ensemble.models[j], reduced);
        }
        return out;
    }
    }
    throw ConfigError("unknown variant tag");
}

double fitness(const RecallBackend& backend, const ImputationTask& task,
               const std::vector<double>& genes) {
    if (genes.size() != task.missing_indices.size())
        throw DataError("gene count does not match missing position count");
    Eigen::VectorXd candidate = task.record;
    for (std::size_t i = 0; i < genes.size(); ++i)
        candidate(task.missing_indices[i]) = genes[i];
    Eigen::VectorXd repr = representation(backend, candidate);
    Eigen::VectorXd reconstructed = recall_full(backend, candidate);
    return -(repr - reconstructed).squaredNorm();
}

namespace {

RecordImputation impute_row(const RecallBackend& backend,
                            const ImputationTask& task,
                            const DatasetSchema& schema,
                            const GaConfig& ga_config, std::uint64_t seed,
                            std::vector<GaTracePoint>* trace_out) {
    if (schema.dimension() != backend.dimension())
        throw DataError("schema dimension does not match the backend");

    std::vector<GeneBounds> bounds(task.missing_indices.size(), {0.0, 1.0});
    GaConfig ga = ga_config;
    ga.seed = seed;
    GaResult evolved = run_ga(
        [&](const std::vector<double>& genes) {
            try {
                return fitness(backend, task, genes);
            } catch (...) {
                return -std::numeric_limits<double>::infinity();
            }
        },
        bounds, ga);

    RecordImputation result;
    result.completed_normalized = task.record;
    for (std::size_t i = 0; i < evolved.best.genes.size(); ++i)
        result.completed_normalized(task.missing_indices[i]) = evolved.best.genes[i];
    result.best_fitness = evolved.best.fitness;
    result.generations_run = static_cast<int>(evolved.history.size()) - 1;

    DataMatrix one(1, schema.dimension(), Space::Normalized);
    one.values.row(0) = result.completed_normalized.transpose();
    result.completed_raw = denormalize(one, schema).values.row(0).transpose();

    if (trace_out) *trace_out = std::move(evolved.trace);
    return result;
}

} // namespace

RecordImputation impute_record(const RecallBackend& backend,
                               const ImputationTask& task,
                               const DatasetSchema& schema,
                               const GaConfig& ga_config, std::uint64_t seed) {
    return impute_row(backend, task, schema, ga_config, seed, nullptr);
}

ImputeResult impute_dataset(const RecallBackend& backend, const DataMatrix& data,
                            const DatasetSchema& schema,
                            const ImputeOptions& options) {
    if (data.space != Space::Normalized)
        throw DataError("imputation expects normalized data");
    if (data.cols() != schema.dimension())
        throw DataError("column count does not match schema");

    std::vector<Eigen::Index> pending;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        if (!data.row_complete(i)) pending.push_back(i);

    ImputeResult result;
    result.completed = data;
    result.completed.mask.setConstant(true);
    result.diagnostics.resize(pending.size());
    std::vector<std::vector<GaTracePoint>> traces(pending.size());
    std::vector<std::exception_ptr> failures(pending.size());
    std::vector<RecordImputation> imputations(pending.size());

    auto work = [&](std::size_t k) {
        const Eigen::Index row = pending[k];
        try {
            ImputationTask task = make_task(data, row);
            std::uint64_t row_seed =
                Rng::mix(options.seed, static_cast<std::uint64_t>(row));
            imputations[k] =
                impute_row(backend, task, schema, options.ga, row_seed,
                           options.trace ? &traces[k] : nullptr);
            RowDiagnostic& diag = result.diagnostics[k];
            diag.row = static_cast<long>(row);
            diag.missing_indices = task.missing_indices;
            for (int j : task.missing_indices)
                diag.imputed_raw.push_back(imputations[k].completed_raw(j));
            diag.best_fitness = imputations[k].best_fitness;
            diag.generations_run = imputations[k].generations_run;
        } catch (const NumericError& e) {
            failures[k] = std::make_exception_ptr(NumericError(
                "row " + std::to_string(row) + ": " + e.what()));
        } catch (const std::exception& e) {
            failures[k] = std::make_exception_ptr(
                DataError("row " + std::to_string(row) + ": " + e.what()));
        }
    };

    int workers = std::max(1, options.workers);
    if (workers == 1 || pending.size() <= 1) {
        for (std::size_t k = 0; k < pending.size(); ++k) work(k);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        int count = std::min<std::size_t>(workers, pending.size());
        for (int t = 0; t < count; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t k = cursor.fetch_add(1);
                    if (k >= pending.size()) return;
                    work(k);
                }
            });
        for (auto& t : pool) t.join();
    }

    for (std::size_t k = 0; k < pending.size(); ++k)
        if (failures[k]) std::rethrow_exception(failures[k]);

    for (std::size_t k = 0; k < pending.size(); ++k) {
        const Eigen::Index row = pending[k];
        result.completed.values.row(row) =
            imputations[k].completed_normalized.transpose();
        if (options.trace) {
            for (const GaTracePoint& point : traces[k]) {
                nlohmann::json line = {{"row", static_cast<long>(row)},
                                       {"generation", point.generation},
                                       {"best_fitness", point.best_fitness},
                                       {"mean_fitness", point.mean_fitness}};
                result.trace_lines.push_back(line.dump());
            }
        }
    }
    return result;
}

namespace {

void write_mlp(BinaryWriter& w, const MlpModel& m) {
    w.matrix(m.w1);
    w.vec(m.b1);
    w.matrix(m.w2);
    w.vec(m.b2);
}

MlpModel read_mlp(BinaryReader& r) {
    MlpModel m;
    m.w1 = r.matrix();
    m.b1 = r.vec();
    m.w2 = r.matrix();
    m.b2 = r.vec();
    if (m.b1.size() != m.w1.rows() || m.w2.cols() != m.w1.rows() ||
        m.b2.size() != m.w2.rows())
        throw DataError("stored network has inconsistent layer shapes");
    return m;
}

} // namespace

void save_backend(const RecallBackend& backend, const std::string& path,
                  const std::string& config_hash, const std::string& prepare_hash) {
    backend.validate();
    BinaryWriter w(FileKind::Backend);
    w.str(config_hash);
    w.str(prepare_hash);
    w.str(variant_name(backend.variant));
    switch (backend.variant) {
    case Variant::Annga:
    case Variant::Pcannga11:
    case Variant::Pcannga10:
        write_mlp(w, backend.autoencoder.core);
        w.u32(backend.autoencoder.training_space == TrainingSpace::PcaTransformed
                  ? 1
                  : 0);
        if (backend.pca) {
            w.u32(1);
            w.vec(backend.pca->mean);
            w.vec(backend.pca->eigenvalues);
            w.matrix(backend.pca->components);
        } else {
            w.u32(0);
        }
        break;
    case Variant::Svrga:
        w.u64(backend.ensemble.models.size());
        for (const SvrModel& m : backend.ensemble.models) {
            w.matrix(m.support_inputs);
            w.vec(m.alphas);
            w.f64(m.bias);
            w.f64(m.kernel.width);
            w.f64(m.regularization);
            w.u64(static_cast<std::uint64_t>(m.target_variable));
            w.f64(m.system_residual);
        }
        break;
    }
    w.save(path);
}

LoadedBackend load_backend(const std::string& path) {
    BinaryReader r(path);
    if (r.kind() != FileKind::Backend)
        throw DataError("artifact " + path + " is not a model file");

    LoadedBackend out;
    out.config_hash = r.str();
    out.prepare_hash = r.str();
    out.backend.variant = variant_from_string(r.str());
    switch (out.backend.variant) {
    case Variant::Annga:
    case Variant::Pcannga11:
    case Variant::Pcannga10: {
        out.backend.autoencoder.core = read_mlp(r);
        out.backend.autoencoder.training_space =
            r.u32() == 1 ? TrainingSpace::PcaTransformed : TrainingSpace::Identity;
        if (r.u32() == 1) {
            PcaTransform t;
            t.mean = r.vec();
            t.eigenvalues = r.vec();
            t.components = r.matrix();
            out.backend.pca = std::move(t);
        }
        break;
    }
    case Variant::Svrga: {
        std::uint64_t count = r.u64();
        out.backend.ensemble.models.resize(count);
        for (std::uint64_t j = 0; j < count; ++j) {
            SvrModel& m = out.backend.ensemble.models[j];
            m.support_inputs = r.matrix();
            m.alphas = r.vec();
            m.bias = r.f64();
            m.kernel.width = r.f64();
            m.regularization = r.f64();
            m.target_variable = static_cast<int>(r.u64());
            m.system_residual = r.f64();
        }
        break;
    }
    }
    out.backend.validate();
    return out;
}

} // namespace gafill
