#include "gafill/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gafill/dataset.hpp"
#include "gafill/errors.hpp"

namespace gafill {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b)
        throw DataError("truth and imputed lengths differ: " + std::to_string(a) +
                        " vs " + std::to_string(b));
    if (a == 0)
        throw DataError("metrics are undefined on empty inputs");
}

} // namespace

double mse(const std::vector<double>& truth, const std::vector<double>& imputed) {
    check_lengths(truth.size(), imputed.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double d = truth[i] - imputed[i];
        sum += d * d;
    }
    return sum / static_cast<double>(truth.size());
}

double classification_accuracy(const std::vector<double>& truth,
                               const std::vector<double>& imputed) {
    check_lengths(truth.size(), imputed.size());
    long matches = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == imputed[i]) ++matches;
    return 100.0 * static_cast<double>(matches) /
           static_cast<double>(truth.size());
}

double tolerance_accuracy(const std::vector<double>& truth,
                          const std::vector<double>& imputed, double tolerance) {
    check_lengths(truth.size(), imputed.size());
    if (tolerance < 0)
        throw ConfigError("tolerance must be nonnegative");
    long within = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (std::abs(truth[i] - imputed[i]) <= tolerance) ++within;
    return 100.0 * static_cast<double>(within) /
           static_cast<double>(truth.size());
}

std::string format_fixed(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    long long scaled = static_cast<long long>(std::floor(value * scale + 0.5));
    bool negative = scaled < 0;
    unsigned long long mag = negative ? -(unsigned long long)scaled : scaled;
    unsigned long long unit = static_cast<unsigned long long>(scale);
    std::string out = negative ? "-" : "";
    out += std::to_string(mag / unit);
    if (decimals > 0) {
        std::string frac = std::to_string(mag % unit);
        out += "." + std::string(decimals - frac.size(), '0') + frac;
    }
    return out;
}

EvaluationReport run_benchmark(const RecordCompleter& completer,
                               const DataMatrix& pool, const DatasetSchema& schema,
                               const BenchmarkOptions& options,
                               const std::string& variant_label) {
    if (pool.space != Space::Normalized)
        throw DataError("benchmark pool must be normalized");
    if (!pool.fully_observed())
        throw DataError("benchmark pool must be fully observed");
    if (pool.cols() != schema.dimension())
        throw DataError("pool column count does not match schema");
    if (options.runs < 1)
        throw ConfigError("runs must be at least 1");
    if (options.records_per_run < 1)
        throw ConfigError("records per run must be at least 1");
    if (pool.rows() < options.records_per_run)
        throw DataError("insufficient pool: " + std::to_string(pool.rows()) +
                        " rows for " + std::to_string(options.records_per_run) +
                        " records per run");
    if (options.target_variables.empty())
        throw ConfigError("at least one target variable is required");

    std::vector<int> target_cols;
    for (const auto& name : options.target_variables) {
        int c = schema.index_of(name);
        if (c < 0)
            throw ConfigError("target variable '" + name + "' is not in the schema");
        target_cols.push_back(c);
    }
    const std::size_t T = target_cols.size();

    EvaluationReport report;
    report.variant = variant_label;
    report.runs = options.runs;
    report.records_per_run = options.records_per_run;
    report.seed = options.seed;

    struct Cell { // per (variable, run) accumulation
        std::vector<double> truth_norm, imputed_norm, truth_raw, imputed_raw;
    };
    std::vector<std::vector<Cell>> cells(
        T, std::vector<Cell>(static_cast<std::size_t>(options.runs)));

    for (int run = 0; run < options.runs; ++run) {
        std::uint64_t run_seed = Rng::mix(options.seed, run + 1);
        report.run_seeds.push_back(run_seed);

        // Sample without replacement via partial shuffle.
        std::vector<Eigen::Index> rows(pool.rows());
        std::iota(rows.begin(), rows.end(), 0);
        Rng sampler(Rng::mix(run_seed, 1));
        const long n = options.records_per_run;
        for (long s = 0; s < n; ++s) {
            std::size_t j = s + sampler.uniform_int(rows.size() - s);
            std::swap(rows[s], rows[j]);
        }

        std::vector<Eigen::VectorXd> completions(n);
        std::vector<std::exception_ptr> failures(n);
        auto complete_one = [&](long s) {
            try {
                Eigen::Index row = rows[s];
                int col = target_cols[s % T];
                Eigen::VectorXd record = pool.values.row(row).transpose();
                record(col) = 0.0;
                std::vector<int> missing = {col};
                completions[s] = completer(row, record, missing,
                                           Rng::mix(run_seed, 1000 + s));
            } catch (...) {
                failures[s] = std::current_exception();
            }
        };

        int workers = std::max(1, options.workers);
        if (workers == 1 || n <= 1) {
            for (long s = 0; s < n; ++s) complete_one(s);
        } else {
            std::atomic<long> cursor{0};
            std::vector<std::thread> threads;
            for (int t = 0; t < std::min<long>(workers, n); ++t)
                threads.emplace_back([&] {
                    for (;;) {
                        long s = cursor.fetch_add(1);
                        if (s >= n) return;
                        complete_one(s);
                    }
                });
            for (auto& t : threads) t.join();
        }
        for (long s = 0; s < n; ++s)
            if (failures[s]) std::rethrow_exception(failures[s]);

        for (long s = 0; s < n; ++s) {
            Eigen::Index row = rows[s];
            std::size_t t_idx = s % T;
            int col = target_cols[t_idx];
            const VariableSpec& var = schema.variables[col];
            Cell& cell = cells[t_idx][run];
            double truth_n = pool.values(row, col);
            double imputed_n = completions[s](col);
            cell.truth_norm.push_back(truth_n);
            cell.imputed_norm.push_back(imputed_n);
            cell.truth_raw.push_back(denormalize_value(truth_n, var));
            cell.imputed_raw.push_back(denormalize_value(imputed_n, var));
        }
    }

    for (std::size_t t_idx = 0; t_idx < T; ++t_idx) {
        VariableResult vr;
        vr.variable = options.target_variables[t_idx];
        auto tol = options.tolerances.find(vr.variable);
        vr.tolerance = tol == options.tolerances.end() ? 0.0 : tol->second;
        for (int run = 0; run < options.runs; ++run) {
            const Cell& cell = cells[t_idx][run];
            vr.run_accuracy.push_back(
                tolerance_accuracy(cell.truth_raw, cell.imputed_raw, vr.tolerance));
            vr.run_mse.push_back(mse(cell.truth_norm, cell.imputed_norm));
            if (options.keep_events) {
                for (std::size_t e = 0; e < cell.truth_raw.size(); ++e)
                    report.events.push_back({run + 1, vr.variable,
                                             cell.truth_raw[e], cell.imputed_raw[e],
                                             cell.truth_norm[e],
                                             cell.imputed_norm[e]});
            }
        }
        vr.events_per_run = static_cast<long>(cells[t_idx][0].truth_raw.size());
        vr.average_accuracy =
            std::accumulate(vr.run_accuracy.begin(), vr.run_accuracy.end(), 0.0) /
            options.runs;
        vr.average_mse =
            std::accumulate(vr.run_mse.begin(), vr.run_mse.end(), 0.0) /
            options.runs;
        report.variables.push_back(std::move(vr));
    }
    return report;
}

EvaluationReport run_benchmark(const RecallBackend& backend, const DataMatrix& pool,
                               const DatasetSchema& schema, const GaConfig& ga_config,
                               const BenchmarkOptions& options) {
    RecordCompleter completer = [&](Eigen::Index, const Eigen::VectorXd& record,
                                    const std::vector<int>& missing_indices,
                                    std::uint64_t seed) {
        std::vector<bool> present(record.size(), true);
        for (int j : missing_indices) present[j] = false;
        ImputationTask task = make_task(record, present);
        return impute_record(backend, task, schema, ga_config, seed)
            .completed_normalized;
    };
    return run_benchmark(completer, pool, schema, options,
                         variant_name(backend.variant));
}

namespace {

void render_row(std::ostringstream& out, const std::string& name, int name_width,
                const std::vector<std::string>& cells, int cell_width) {
    out << name << std::string(name_width - name.size(), ' ');
    for (const auto& c : cells)
        out << std::string(cell_width - c.size(), ' ') << c;
    out << '\n';
}

} // namespace

std::string render_table(const EvaluationReport& report) {
    int name_width = 10;
    for (const auto& vr : report.variables)
        name_width = std::max(name_width, static_cast<int>(vr.variable.size()) + 2);

    std::ostringstream out;
    out << "Backend: " << report.variant << "   runs: " << report.runs
        << "   records per run: " << report.records_per_run
        << "   seed: " << report.seed << "\n\n";

    std::vector<std::string> header = {"Tolerance"};
    for (int r = 1; r <= report.runs; ++r) header.push_back("Run " + std::to_string(r));
    header.push_back("Average");

    out << "Accuracy (%)\n";
    render_row(out, "Variable", name_width, header, 12);
    for (const auto& vr : report.variables) {
        std::vector<std::string> cells = {format_fixed(vr.tolerance, 0)};
        for (double a : vr.run_accuracy) cells.push_back(format_fixed(a, 1));
        cells.push_back(format_fixed(vr.average_accuracy, 1));
        render_row(out, vr.variable, name_width, cells, 12);
    }

    out << "\nMean squared error (normalized space)\n";
    std::vector<std::string> mse_header(header.begin() + 1, header.end());
    render_row(out, "Variable", name_width, mse_header, 12);
    for (const auto& vr : report.variables) {
        std::vector<std::string> cells;
        for (double m : vr.run_mse) cells.push_back(format_fixed(m, 6));
        cells.push_back(format_fixed(vr.average_mse, 6));
        render_row(out, vr.variable, name_width, cells, 12);
    }
    return out.str();
}

std::string render_jsonl(const EvaluationReport& report) {
    std::ostringstream out;
    nlohmann::json meta = {{"variant", report.variant},
                           {"metric", "meta"},
                           {"runs", report.runs},
                           {"records_per_run", report.records_per_run},
                           {"seed", report.seed},
                           {"run_seeds", report.run_seeds}};
    out << meta.dump() << '\n';
    for (const auto& vr : report.variables) {
        for (int r = 0; r < report.runs; ++r) {
            nlohmann::json acc = {{"variant", report.variant},
                                  {"variable", vr.variable},
                                  {"run", r + 1},
                                  {"metric", "accuracy"},
                                  {"tolerance", vr.tolerance},
                                  {"value", vr.run_accuracy[r]}};
            out << acc.dump() << '\n';
            nlohmann::json err = {{"variant", report.variant},
                                  {"variable", vr.variable},
                                  {"run", r + 1},
                                  {"metric", "mse"},
                                  {"value", vr.run_mse[r]}};
            out << err.dump() << '\n';
        }
        nlohmann::json avg_acc = {{"variant", report.variant},
                                  {"variable", vr.variable},
                                  {"run", nullptr},
                                  {"metric", "accuracy_average"},
                                  {"tolerance", vr.tolerance},
                                  {"value", vr.average_accuracy}};
        out << avg_acc.dump() << '\n';
        nlohmann::json avg_mse = {{"variant", report.variant},
                                  {"variable", vr.variable},
                                  {"run", nullptr},
                                  {"metric", "mse_average"},
                                  {"value", vr.average_mse}};
        out << avg_mse.dump() << '\n';
    }
    return out.str();
}

} // namespace gafill
