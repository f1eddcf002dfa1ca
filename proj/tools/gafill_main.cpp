#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gafill/commands.hpp"
#include "gafill/config.hpp"
#include "gafill/errors.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = -1;
    bool verbose = false;
    std::string variant;
    int hidden = 0;
    int cycles = 0;
    int pca_k = 0;
    int population = 0;
    int generations = 0;
    int runs = 0;
    long records_per_run = 0;
    long subsample = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "JSON config file; flags override file values");
    cmd->add_option("--out-dir", flags.out_dir, "Directory for output artifacts");
    cmd->add_option("--seed", flags.seed, "Master seed for all randomness");
    cmd->add_option("--workers", flags.workers,
                    "Worker threads (0 = all cores); never changes results");
    cmd->add_flag("--verbose", flags.verbose,
                  "Write per-generation search trace logs");
    cmd->add_option("--variant", flags.variant,
                    "Backend: ANNGA, PCANNGA-11, PCANNGA-10, or SVRGA");
    cmd->add_option("--hidden", flags.hidden, "Recall network hidden units");
    cmd->add_option("--cycles", flags.cycles, "Maximum training cycles");
    cmd->add_option("--pca-k", flags.pca_k, "Retained components");
    cmd->add_option("--population", flags.population, "Search population size");
    cmd->add_option("--generations", flags.generations, "Search generations");
    cmd->add_option("--runs", flags.runs, "Benchmark repetitions");
    cmd->add_option("--records-per-run", flags.records_per_run,
                    "Benchmark records per repetition");
    cmd->add_option("--subsample", flags.subsample,
                    "Training rows kept for per-variable regressors");
}

gafill::RunConfig build_config(const CLI::App* cmd, const CommonFlags& flags) {
    gafill::RunConfig config;
    if (!flags.config_path.empty())
        config = gafill::load_config(flags.config_path);
    if (cmd->count("--out-dir")) config.out_dir = flags.out_dir;
    if (cmd->count("--seed")) config.seed = flags.seed;
    if (cmd->count("--workers")) config.workers = flags.workers;
    if (cmd->count("--verbose")) config.verbose = flags.verbose;
    if (cmd->count("--variant")) config.variant = flags.variant;
    if (cmd->count("--hidden")) config.hidden_count = flags.hidden;
    if (cmd->count("--cycles")) config.max_cycles = flags.cycles;
    if (cmd->count("--pca-k")) config.pca_k = flags.pca_k;
    if (cmd->count("--population")) config.ga_population = flags.population;
    if (cmd->count("--generations")) config.ga_generations = flags.generations;
    if (cmd->count("--runs")) config.runs = flags.runs;
    if (cmd->count("--records-per-run"))
        config.records_per_run = flags.records_per_run;
    if (cmd->count("--subsample")) config.svr_subsample = flags.subsample;
    config.validate();
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "gafill: trains recall models over complete records and searches "
        "their reconstruction error to fill missing values.\n"
        "Exit codes: 0 success, 2 configuration error, 3 data error, "
        "4 numerical failure, 10 nothing was missing (informational)."};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
    long synth_n = 0;
    std::string synth_out;
    synth->add_option("--n", synth_n, "Record count")->required();
    synth->add_option("output", synth_out, "Output CSV path")->required();
    add_common(synth, flags);

    auto* prepare =
        app.add_subcommand("prepare", "Screen, normalize, and partition a CSV");
    std::string prepare_input;
    prepare->add_option("input", prepare_input, "Input CSV path")->required();
    add_common(prepare, flags);

    auto* train =
        app.add_subcommand("train", "Train a recall backend from prepared data");
    std::string train_dir;
    train->add_option("prepared", train_dir, "Prepared artifact directory")
        ->required();
    add_common(train, flags);

    auto* impute =
        app.add_subcommand("impute", "Fill the missing cells of a CSV");
    std::string impute_backend, impute_input, impute_output;
    impute->add_option("backend", impute_backend, "Trained backend file")
        ->required();
    impute->add_option("input", impute_input, "CSV with missing cells")
        ->required();
    impute->add_option("output", impute_output, "Completed CSV path")->required();
    add_common(impute, flags);

    auto* evaluate = app.add_subcommand(
        "evaluate", "Score a backend with the repeated-amputation protocol");
    std::string eval_backend, eval_dir;
    evaluate->add_option("backend", eval_backend, "Trained backend file")
        ->required();
    evaluate->add_option("prepared", eval_dir, "Prepared artifact directory")
        ->required();
    add_common(evaluate, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : gafill::kExitConfig;
    }

    try {
        if (synth->parsed())
            return gafill::run_synth(build_config(synth, flags), synth_n, synth_out);
        if (prepare->parsed())
            return gafill::run_prepare(build_config(prepare, flags), prepare_input);
        if (train->parsed())
            return gafill::run_train(build_config(train, flags), train_dir);
        if (impute->parsed())
            return gafill::run_impute(build_config(impute, flags), impute_backend,
                                      impute_input, impute_output);
        if (evaluate->parsed())
            return gafill::run_evaluate(build_config(evaluate, flags), eval_backend,
                                        eval_dir);
    } catch (const gafill::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return gafill::kExitConfig;
    } catch (const gafill::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return gafill::kExitData;
    } catch (const gafill::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return gafill::kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gafill::kExitNumeric;
    }
    return gafill::kExitConfig;
}
