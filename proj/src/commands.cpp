#include "gafill/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gafill/dataset.hpp"
#include "gafill/errors.hpp"
#include "gafill/eval.hpp"
#include "gafill/imputer.hpp"
#include "gafill/serialize.hpp"

namespace gafill {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Stream tags for deriving stage seeds from the one config seed.
constexpr std::uint64_t kSeedPartition = 1;
constexpr std::uint64_t kSeedImpute = 2;
constexpr std::uint64_t kSeedTrain = 3;
constexpr std::uint64_t kSeedSvrFit = 4;
constexpr std::uint64_t kSeedBenchmark = 6;

DatasetSchema schema_for(const RunConfig& config) {
    DatasetSchema schema = config.schema_path.empty()
                               ? reference_schema()
                               : load_schema(config.schema_path);
    schema.validate();
    return schema;
}

int resolve_workers(const RunConfig& config) {
    if (config.workers > 0) return config.workers;
    unsigned n = std::thread::hardware_concurrency();
    return n > 0 ? static_cast<int>(n) : 1;
}

GaConfig impute_ga(const RunConfig& config) {
    GaConfig ga;
    ga.population_size = config.ga_population;
    ga.generations = config.ga_generations;
    ga.selection_q = config.ga_selection_q;
    ga.mutation_b = config.ga_mutation_b;
    ga.crossover_count = config.ga_crossover_count;
    ga.mutation_count = config.ga_mutation_count;
    return ga;
}

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec)
        throw DataError("cannot create output directory " + config.out_dir + ": " +
                        ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw DataError("cannot write " + path);
    out << content;
    if (!out)
        throw DataError("failed while writing " + path);
}

void write_effective_config(const RunConfig& config) {
    json echo;
    echo["config_hash"] = config_hash(config);
    echo["settings"] = json::parse(config_json(config));
    write_text(join_path(config.out_dir, "effective_config.json"),
               echo.dump(2) + "\n");
}

} // namespace

int run_synth(const RunConfig& config, long n, const std::string& output_csv) {
    DatasetSchema schema = schema_for(config);
    DataMatrix data = synthesize(schema, n, config.seed);
    save_csv(data, schema, output_csv);
    std::cout << "wrote " << n << " synthetic records to " << output_csv << "\n";
    return kExitOk;
}

int run_prepare(const RunConfig& config, const std::string& input_csv) {
    DatasetSchema schema = schema_for(config);
    ensure_out_dir(config);

    LoadResult loaded = load_csv(input_csv, schema);
    auto [screened, outliers] = screen_outliers(loaded.data, schema);
    DataMatrix normalized = normalize(screened, schema);
    PartitionFractions fractions{config.train_fraction, config.validation_fraction,
                                 config.test_fraction};
    PartitionResult parts =
        partition(normalized, fractions, Rng::mix(config.seed, kSeedPartition));

    const std::string hash = config_hash(config);
    save_matrix(parts.train, join_path(config.out_dir, "train.bin"), hash);
    save_matrix(parts.validation, join_path(config.out_dir, "validation.bin"), hash);
    save_matrix(parts.test, join_path(config.out_dir, "test.bin"), hash);
    save_matrix(parts.impute_pool, join_path(config.out_dir, "impute_pool.bin"),
                hash);
    save_schema(schema, join_path(config.out_dir, "schema.json"));

    json report;
    report["input_rows"] = loaded.data.rows();
    report["cell_issues"] = loaded.issues.size();
    json issue_list = json::array();
    for (std::size_t i = 0; i < loaded.issues.size() && i < 20; ++i) {
        const CellIssue& issue = loaded.issues[i];
        issue_list.push_back({{"row", issue.row},
                              {"column", schema.variables[issue.column].name},
                              {"content", issue.content},
                              {"reason", issue.reason}});
    }
    report["cell_issue_examples"] = issue_list;
    json flips;
    for (int j = 0; j < schema.dimension(); ++j)
        flips[schema.variables[j].name] = outliers.flips_per_column[j];
    report["outlier_flips"] = flips;
    report["outlier_flips_total"] = outliers.total();
    report["partition"] = {{"train", parts.train.rows()},
                           {"validation", parts.validation.rows()},
                           {"test", parts.test.rows()},
                           {"impute_pool", parts.impute_pool.rows()}};
    report["config_hash"] = hash;
    write_text(join_path(config.out_dir, "prepare_report.json"),
               report.dump(2) + "\n");
    write_effective_config(config);

    std::cout << "prepared " << loaded.data.rows() << " rows: train "
              << parts.train.rows() << ", validation " << parts.validation.rows()
              << ", test " << parts.test.rows() << ", impute pool "
              << parts.impute_pool.rows() << " (outlier flips "
              << outliers.total() << ")\n";
    return kExitOk;
}

int run_train(const RunConfig& config, const std::string& prepared_dir) {
    DatasetSchema schema = load_schema(join_path(prepared_dir, "schema.json"));
    schema.validate();
    ensure_out_dir(config);

    LoadedMatrix train = load_matrix(join_path(prepared_dir, "train.bin"));
    LoadedMatrix validation =
        load_matrix(join_path(prepared_dir, "validation.bin"));
    if (train.producing_hash != validation.producing_hash)
        throw DataError("prepared artifacts come from different preparation runs "
                        "(embedded hashes differ); rerun the prepare step");
    const std::string prepare_hash = train.producing_hash;

    Variant variant = variant_from_string(config.variant);
    TrainConfig tc;
    tc.max_cycles = config.max_cycles;
    tc.patience = config.patience;
    tc.seed = Rng::mix(config.seed, kSeedTrain);

    RecallBackend backend;
    backend.variant = variant;
    json report;
    report["variant"] = config.variant;

    auto history_json = [](const std::vector<CyclePoint>& history) {
        json arr = json::array();
        for (std::size_t i = 0; i < history.size(); ++i)
            arr.push_back({{"cycle", i + 1},
                           {"train_loss", history[i].train_loss},
                           {"validation_loss", history[i].validation_loss}});
        return arr;
    };

    switch (variant) {
    case Variant::Annga: {
        AutoencoderTrainResult trained = train_autoencoder(
            train.data, validation.data, config.resolved_hidden_count(), tc);
        backend.autoencoder = std::move(trained.model);
        report["hidden_count"] = config.resolved_hidden_count();
        report["cycles_run"] = trained.history.size();
        report["history"] = history_json(trained.history);
        break;
    }
    case Variant::Pcannga11:
    case Variant::Pcannga10: {
        int k = config.resolved_pca_k();
        if (k < 1 || k > schema.dimension())
            throw ConfigError("pca_k = " + std::to_string(k) +
                              " must lie in 1.." +
                              std::to_string(schema.dimension()));
        PcaTransform pca = fit_pca(train.data, k);
        Eigen::MatrixXd train_p = pca.transform(train.data.values);
        Eigen::MatrixXd val_p = pca.transform(validation.data.values);
        AutoencoderTrainResult trained =
            train_autoencoder(train_p, val_p, config.resolved_hidden_count(), tc,
                              TrainingSpace::PcaTransformed);
        backend.autoencoder = std::move(trained.model);
        backend.pca = std::move(pca);
        report["hidden_count"] = config.resolved_hidden_count();
        report["pca_k"] = k;
        json eigenvalues = json::array();
        for (Eigen::Index i = 0; i < backend.pca->eigenvalues.size(); ++i)
            eigenvalues.push_back(backend.pca->eigenvalues(i));
        report["eigenvalues"] = eigenvalues;
        report["cycles_run"] = trained.history.size();
        report["history"] = history_json(trained.history);
        break;
    }
    case Variant::Svrga: {
        GaConfig tune;
        tune.population_size = config.svr_tune_population;
        tune.generations = config.svr_tune_generations;
        tune.selection_q = config.ga_selection_q;
        tune.mutation_b = config.ga_mutation_b;
        HyperBounds bounds{config.svr_width_low, config.svr_width_high,
                           config.svr_reg_low, config.svr_reg_high};
        backend.ensemble = fit_ensemble(
            train.data, validation.data, tune, bounds,
            Rng::mix(config.seed, kSeedSvrFit), config.svr_subsample,
            resolve_workers(config));
        json models = json::array();
        for (const SvrModel& m : backend.ensemble.models)
            models.push_back({{"variable", schema.variables[m.target_variable].name},
                              {"kernel_width", m.kernel.width},
                              {"regularization", m.regularization},
                              {"system_residual", m.system_residual},
                              {"support_count", m.support_inputs.rows()}});
        report["models"] = models;
        report["subsample"] = config.svr_subsample;
        break;
    }
    }

    backend.validate();
    if (backend.dimension() != schema.dimension())
        throw DataError("trained backend dimension does not match the schema");
    save_backend(backend, join_path(config.out_dir, "backend.bin"),
                 config_hash(config), prepare_hash);
    report["prepare_hash"] = prepare_hash;
    report["config_hash"] = config_hash(config);
    write_text(join_path(config.out_dir, "training_report.json"),
               report.dump(2) + "\n");
    write_effective_config(config);

    std::cout << "trained " << config.variant << " backend -> "
              << join_path(config.out_dir, "backend.bin") << "\n";
    return kExitOk;
}

int run_impute(const RunConfig& config, const std::string& backend_path,
               const std::string& input_csv, const std::string& output_csv) {
    DatasetSchema schema = schema_for(config);
    ensure_out_dir(config);

    LoadedBackend loaded = load_backend(backend_path);
    if (loaded.backend.dimension() != schema.dimension())
        throw DataError("backend dimension " +
                        std::to_string(loaded.backend.dimension()) +
                        " does not match the schema dimension " +
                        std::to_string(schema.dimension()));

    LoadResult input = load_csv(input_csv, schema);
    auto [screened, outliers] = screen_outliers(input.data, schema);

    if (screened.missing_count() == 0) {
        // Nothing to do; copy the input bytes through untouched.
        std::ifstream in(input_csv, std::ios::binary);
        std::ostringstream bytes;
        bytes << in.rdbuf();
        write_text(output_csv, bytes.str());
        std::cout << "no missing cells in " << input_csv
                  << "; output is a verbatim copy\n";
        return kExitNothingMissing;
    }

    DataMatrix normalized = normalize(screened, schema);
    ImputeOptions options;
    options.ga = impute_ga(config);
    options.seed = Rng::mix(config.seed, kSeedImpute);
    options.workers = resolve_workers(config);
    options.trace = config.verbose;
    ImputeResult result =
        impute_dataset(loaded.backend, normalized, schema, options);

    // Observed cells keep their original raw values; only missing cells
    // take imputed values.
    DataMatrix final_raw = screened;
    final_raw.mask.setConstant(true);
    for (const RowDiagnostic& diag : result.diagnostics)
        for (std::size_t i = 0; i < diag.missing_indices.size(); ++i)
            final_raw.values(diag.row, diag.missing_indices[i]) =
                diag.imputed_raw[i];
    save_csv(final_raw, schema, output_csv);

    std::ostringstream sidecar;
    for (const RowDiagnostic& diag : result.diagnostics)
        for (std::size_t i = 0; i < diag.missing_indices.size(); ++i) {
            json line = {{"row", diag.row},
                         {"variable", schema.variables[diag.missing_indices[i]].name},
                         {"imputed", diag.imputed_raw[i]},
                         {"best_fitness", diag.best_fitness},
                         {"generations", diag.generations_run}};
            sidecar << line.dump() << '\n';
        }
    write_text(join_path(config.out_dir, "impute_diagnostics.jsonl"),
               sidecar.str());
    if (config.verbose) {
        std::ostringstream trace;
        for (const std::string& line : result.trace_lines) trace << line << '\n';
        write_text(join_path(config.out_dir, "ga_trace.jsonl"), trace.str());
    }
    write_effective_config(config);

    std::cout << "imputed " << result.diagnostics.size() << " rows ("
              << screened.missing_count() << " cells, "
              << outliers.total() << " of them screened outliers) -> "
              << output_csv << "\n";
    return kExitOk;
}

int run_evaluate(const RunConfig& config, const std::string& backend_path,
                 const std::string& prepared_dir) {
    DatasetSchema schema = load_schema(join_path(prepared_dir, "schema.json"));
    schema.validate();
    ensure_out_dir(config);

    LoadedBackend loaded = load_backend(backend_path);
    if (loaded.backend.dimension() != schema.dimension())
        throw DataError("backend dimension does not match the prepared schema");
    LoadedMatrix test = load_matrix(join_path(prepared_dir, "test.bin"));
    if (loaded.prepare_hash != test.producing_hash)
        throw DataError("the model was trained on a different preparation run "
                        "than this test set (embedded hashes differ)");

    BenchmarkOptions options;
    options.runs = config.runs;
    options.records_per_run = config.records_per_run;
    options.target_variables = config.target_variables;
    options.tolerances = config.tolerances;
    options.seed = Rng::mix(config.seed, kSeedBenchmark);
    options.workers = resolve_workers(config);
    EvaluationReport report = run_benchmark(loaded.backend, test.data, schema,
                                            impute_ga(config), options);

    std::string table = render_table(report);
    write_text(join_path(config.out_dir, "report.txt"), table);
    write_text(join_path(config.out_dir, "report.jsonl"), render_jsonl(report));
    write_effective_config(config);

    std::cout << table;
    return kExitOk;
}

} // namespace gafill
