#include "gafill/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gafill/errors.hpp"
#include "gafill/rng.hpp"

namespace gafill {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

// Shortest representation that round-trips the exact double.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double round_half_up(double v) { return std::floor(v + 0.5); }

} // namespace

long OutlierReport::total() const {
    return std::accumulate(flips_per_column.begin(), flips_per_column.end(), 0L);
}

LoadResult load_csv(const std::string& path, const DatasetSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw DataError("input file " + path + " is empty (no header row)");

    const int d = schema.dimension();
    auto header = split_line(line);
    if (static_cast<int>(header.size()) != d)
        throw DataError("header of " + path + " has " + std::to_string(header.size()) +
                        " columns, schema expects " + std::to_string(d));
    for (int j = 0; j < d; ++j) {
        if (trimmed(header[j]) != schema.variables[j].name)
            throw DataError("header mismatch in " + path + ": column " +
                            std::to_string(j + 1) + " is '" + trimmed(header[j]) +
                            "', schema expects '" + schema.variables[j].name + "'");
    }

    std::vector<std::vector<double>> rows;
    std::vector<std::vector<bool>> masks;
    LoadResult result;
    long row_index = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.peek() == EOF) break; // trailing newline
        auto cells = split_line(line);
        if (static_cast<int>(cells.size()) != d)
            throw DataError(path + ": row " + std::to_string(row_index + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(d));
        std::vector<double> values(d, 0.0);
        std::vector<bool> present(d, false);
        for (int j = 0; j < d; ++j) {
            std::string cell = trimmed(cells[j]);
            if (cell.empty()) continue; // missing, no issue
            double v;
            if (parse_double(cell, v)) {
                values[j] = v;
                present[j] = true;
                continue;
            }
            if (auto code = schema.variables[j].code_for(cell)) {
                values[j] = static_cast<double>(*code);
                present[j] = true;
                continue;
            }
            std::string reason = schema.variables[j].lookup.empty()
                                     ? "unparseable value"
                                     : "category not in lookup table";
            result.issues.push_back({row_index, j, cell, reason});
        }
        rows.push_back(std::move(values));
        masks.push_back(std::move(present));
        ++row_index;
    }

    DataMatrix data(static_cast<Eigen::Index>(rows.size()), d, Space::Raw);
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        for (int j = 0; j < d; ++j) {
            data.values(i, j) = masks[i][j] ? rows[i][j] : 0.0;
            data.mask(i, j) = masks[i][j];
        }
    result.data = std::move(data);
    return result;
}

void save_csv(const DataMatrix& data, const DatasetSchema& schema,
              const std::string& path) {
    if (data.cols() != schema.dimension())
        throw DataError("matrix has " + std::to_string(data.cols()) +
                        " columns, schema expects " + std::to_string(schema.dimension()));
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write output file: " + path);
    for (int j = 0; j < schema.dimension(); ++j) {
        if (j) out << ',';
        out << schema.variables[j].name;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (j) out << ',';
            if (data.mask(i, j)) out << format_double(data.values(i, j));
        }
        out << '\n';
    }
    if (!out)
        throw DataError("failed while writing " + path);
}

std::pair<DataMatrix, OutlierReport>
screen_outliers(const DataMatrix& data, const DatasetSchema& schema) {
    if (data.space != Space::Raw)
        throw DataError("screen_outliers expects raw-space data");
    if (data.cols() != schema.dimension())
        throw DataError("column count does not match schema");

    DataMatrix out = data;
    OutlierReport report;
    report.flips_per_column.assign(schema.dimension(), 0);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (int j = 0; j < schema.dimension(); ++j) {
            if (!out.mask(i, j)) continue;
            const auto& v = schema.variables[j];
            double x = out.values(i, j);
            if (x < v.min || x > v.max) { // bounds are inclusive
                out.mask(i, j) = false;
                out.values(i, j) = 0.0;
                ++report.flips_per_column[j];
            }
        }
    }
    return {std::move(out), std::move(report)};
}

DataMatrix normalize(const DataMatrix& data, const DatasetSchema& schema) {
    if (data.space != Space::Raw)
        throw DataError("normalize expects raw-space data");
    if (data.cols() != schema.dimension())
        throw DataError("column count does not match schema");

    DataMatrix out = data;
    out.space = Space::Normalized;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (int j = 0; j < schema.dimension(); ++j) {
            if (!out.mask(i, j)) continue;
            const auto& v = schema.variables[j];
            double x = out.values(i, j);
            if (x < v.min || x > v.max)
                throw DataError("value " + format_double(x) + " in column '" + v.name +
                                "' (row " + std::to_string(i) +
                                ") is outside the schema range; screen outliers first");
            out.values(i, j) = (x - v.min) / (v.max - v.min);
        }
    }
    return out;
}

DataMatrix denormalize(const DataMatrix& data, const DatasetSchema& schema) {
    if (data.space != Space::Normalized)
        throw DataError("denormalize expects normalized data");
    if (data.cols() != schema.dimension())
        throw DataError("column count does not match schema");

    DataMatrix out = data;
    out.space = Space::Raw;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        for (int j = 0; j < schema.dimension(); ++j)
            if (out.mask(i, j))
                out.values(i, j) =
                    denormalize_value(data.values(i, j), schema.variables[j]);
    return out;
}

double denormalize_value(double normalized, const VariableSpec& variable) {
    double x = normalized * (variable.max - variable.min) + variable.min;
    if (variable.is_discrete())
        x = std::clamp(round_half_up(x), variable.min, variable.max);
    return x;
}

PartitionResult partition(const DataMatrix& data,
                          const PartitionFractions& fractions,
                          std::uint64_t seed) {
    double sum = fractions.train + fractions.validation + fractions.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("partition fractions must sum to 1, got " + format_double(sum));
    if (fractions.train < 0 || fractions.validation < 0 || fractions.test < 0)
        throw ConfigError("partition fractions must be nonnegative");

    std::vector<Eigen::Index> complete, incomplete;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        (data.row_complete(i) ? complete : incomplete).push_back(i);
    if (complete.empty())
        throw DataError("no complete rows available to partition");

    Rng rng(seed);
    for (std::size_t i = complete.size(); i > 1; --i)
        std::swap(complete[i - 1], complete[rng.uniform_int(i)]);

    const auto n = static_cast<long>(complete.size());
    long n_val = static_cast<long>(std::floor(n * fractions.validation));
    long n_test = static_cast<long>(std::floor(n * fractions.test));
    long n_train = static_cast<long>(std::floor(n * fractions.train));
    n_train += n - n_train - n_val - n_test; // remainder joins training

    auto take = [&](long offset, long count) {
        DataMatrix m(count, data.cols(), data.space);
        for (long i = 0; i < count; ++i) {
            m.values.row(i) = data.values.row(complete[offset + i]);
            m.mask.row(i) = data.mask.row(complete[offset + i]);
        }
        return m;
    };

    PartitionResult result;
    result.train = take(0, n_train);
    result.validation = take(n_train, n_val);
    result.test = take(n_train + n_val, n_test);

    DataMatrix pool(static_cast<Eigen::Index>(incomplete.size()), data.cols(), data.space);
    for (std::size_t i = 0; i < incomplete.size(); ++i) {
        pool.values.row(static_cast<Eigen::Index>(i)) = data.values.row(incomplete[i]);
        pool.mask.row(static_cast<Eigen::Index>(i)) = data.mask.row(incomplete[i]);
    }
    result.impute_pool = std::move(pool);
    return result;
}

AmputeResult ampute(const DataMatrix& data, const DatasetSchema& schema,
                    const std::vector<std::string>& target_variables,
                    int per_row_count, std::uint64_t seed) {
    if (!data.fully_observed())
        throw DataError("ampute expects fully observed data");
    std::vector<int> targets;
    for (const auto& name : target_variables) {
        int j = schema.index_of(name);
        if (j < 0)
            throw ConfigError("target variable '" + name + "' is not in the schema");
        targets.push_back(j);
    }
    if (per_row_count < 0 || per_row_count > static_cast<int>(targets.size()))
        throw ConfigError("per_row_count " + std::to_string(per_row_count) +
                          " exceeds the " + std::to_string(targets.size()) +
                          " target variables");

    AmputeResult result;
    result.ground_truth = data;
    result.amputed = data;

    Rng rng(seed);
    std::vector<int> pick(targets);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        // partial Fisher-Yates: first per_row_count entries are the sample
        for (int k = 0; k < per_row_count; ++k) {
            std::size_t j = k + rng.uniform_int(pick.size() - k);
            std::swap(pick[k], pick[j]);
            result.amputed.mask(i, pick[k]) = false;
            result.amputed.values(i, pick[k]) = 0.0;
        }
    }
    return result;
}

DataMatrix synthesize(const DatasetSchema& schema, long n, std::uint64_t seed) {
    schema.validate();
    if (n <= 0)
        throw ConfigError("synthesize needs n > 0");

    const int d = schema.dimension();
    const int i_age = schema.index_of("Age Group");
    const int i_edu = schema.index_of("Education");
    const int i_grav = schema.index_of("Gravidity");
    const int i_par = schema.index_of("Parity");
    const int i_hiv = schema.index_of("HIV Status");

    auto uniform_in_range = [](const VariableSpec& v, double u) {
        if (v.kind == VariableKind::Continuous)
            return v.min + u * (v.max - v.min);
        // uniform over the integers of the range
        double span = v.max - v.min + 1.0;
        return std::min(v.min + std::floor(u * span), v.max);
    };

    DataMatrix out(n, d, Space::Raw);
    Rng rng(seed);
    std::vector<double> u(d);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) u[j] = rng.uniform();

        // independents first, then the dependent chain
        for (int j = 0; j < d; ++j) {
            if (j == i_grav || j == i_par || j == i_hiv) continue;
            out.values(i, j) = uniform_in_range(schema.variables[j], u[j]);
        }
        double age_t = 0.5, edu_t = 0.5;
        if (i_age >= 0) {
            const auto& v = schema.variables[i_age];
            age_t = (out.values(i, i_age) - v.min) / (v.max - v.min);
        }
        if (i_edu >= 0) {
            const auto& v = schema.variables[i_edu];
            edu_t = (out.values(i, i_edu) - v.min) / (v.max - v.min);
        }
        if (i_grav >= 0) {
            const auto& v = schema.variables[i_grav];
            double x = (i_age >= 0)
                           ? v.max * age_t - 0.5 + u[i_grav]
                           : uniform_in_range(v, u[i_grav]);
            out.values(i, i_grav) = std::clamp(round_half_up(x), v.min, v.max);
        }
        if (i_par >= 0) {
            const auto& v = schema.variables[i_par];
            double x = (i_grav >= 0)
                           ? out.values(i, i_grav) * (0.5 + 0.5 * u[i_par])
                           : uniform_in_range(v, u[i_par]);
            out.values(i, i_par) = std::clamp(round_half_up(x), v.min, v.max);
        }
        if (i_hiv >= 0) {
            double score = 0.5 * age_t + 0.5 * (1.0 - edu_t);
            out.values(i, i_hiv) =
                (score + 0.04 * (u[i_hiv] - 0.5) > 0.47) ? 1.0 : 0.0;
        }
    }
    return out;
}

} // namespace gafill
