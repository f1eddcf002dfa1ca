#include "gafill/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gafill/errors.hpp"
#include "gafill/serialize.hpp"

namespace gafill {

namespace {

using nlohmann::json;

double as_number(const json& v, const std::string& key) {
    if (!v.is_number())
        throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

long as_integer(const json& v, const std::string& key) {
    if (!v.is_number_integer())
        throw ConfigError("config key '" + key + "' must be an integer");
    return v.get<long>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string())
        throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace

int RunConfig::resolved_hidden_count() const {
    if (hidden_count > 0) return hidden_count;
    if (variant == "PCANNGA-10") return 9;
    return 10; // ANNGA and PCANNGA-11 reference setting
}

int RunConfig::resolved_pca_k() const {
    if (pca_k > 0) return pca_k;
    if (variant == "PCANNGA-11") return 11;
    if (variant == "PCANNGA-10") return 10;
    return -1;
}

void RunConfig::validate() const {
    if (variant != "ANNGA" && variant != "PCANNGA-11" &&
        variant != "PCANNGA-10" && variant != "SVRGA")
        throw ConfigError("unknown variant '" + variant +
                          "' (expected ANNGA, PCANNGA-11, PCANNGA-10, or SVRGA)");
    if (max_cycles < 1 || patience < 1)
        throw ConfigError("max_cycles and patience must be at least 1");
    if (ga_population < 2 || ga_generations < 1)
        throw ConfigError("ga_population must be >= 2 and ga_generations >= 1");
    if (!(ga_selection_q > 0 && ga_selection_q < 1))
        throw ConfigError("ga_selection_q must lie strictly between 0 and 1");
    if (!(ga_mutation_b > 0))
        throw ConfigError("ga_mutation_b must be positive");
    if (!(svr_width_low > 0 && svr_width_low <= svr_width_high))
        throw ConfigError("svr width bounds must be positive with low <= high");
    if (!(svr_reg_low > 0 && svr_reg_low <= svr_reg_high))
        throw ConfigError("svr regularization bounds must be positive with low <= high");
    if (svr_subsample < 1)
        throw ConfigError("svr_subsample must be at least 1");
    if (svr_tune_population < 2 || svr_tune_generations < 1)
        throw ConfigError("svr tuning GA sizes are too small");
    double sum = train_fraction + validation_fraction + test_fraction;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("partition fractions must sum to 1");
    if (train_fraction < 0 || validation_fraction < 0 || test_fraction < 0)
        throw ConfigError("partition fractions must be nonnegative");
    if (runs < 1 || records_per_run < 1)
        throw ConfigError("runs and records_per_run must be at least 1");
    if (target_variables.empty())
        throw ConfigError("target_variables must not be empty");
    for (std::size_t i = 0; i < target_variables.size(); ++i)
        for (std::size_t k = i + 1; k < target_variables.size(); ++k)
            if (target_variables[i] == target_variables[k])
                throw ConfigError("target_variables lists '" + target_variables[i] +
                                  "' more than once");
    for (const auto& [name, tol] : tolerances)
        if (tol < 0)
            throw ConfigError("tolerance for '" + name + "' must be nonnegative");
    if (workers < 0)
        throw ConfigError("workers must be nonnegative");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + " is not valid JSON: " + e.what());
    }
    if (!j.is_object())
        throw ConfigError(source + " must contain a JSON object");

    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "schema_path") c.schema_path = as_string(value, key);
        else if (key == "variant") c.variant = as_string(value, key);
        else if (key == "hidden_count") c.hidden_count = static_cast<int>(as_integer(value, key));
        else if (key == "max_cycles") c.max_cycles = static_cast<int>(as_integer(value, key));
        else if (key == "patience") c.patience = static_cast<int>(as_integer(value, key));
        else if (key == "pca_k") c.pca_k = static_cast<int>(as_integer(value, key));
        else if (key == "svr_width_low") c.svr_width_low = as_number(value, key);
        else if (key == "svr_width_high") c.svr_width_high = as_number(value, key);
        else if (key == "svr_reg_low") c.svr_reg_low = as_number(value, key);
        else if (key == "svr_reg_high") c.svr_reg_high = as_number(value, key);
        else if (key == "svr_subsample") c.svr_subsample = as_integer(value, key);
        else if (key == "svr_tune_population") c.svr_tune_population = static_cast<int>(as_integer(value, key));
        else if (key == "svr_tune_generations") c.svr_tune_generations = static_cast<int>(as_integer(value, key));
        else if (key == "ga_population") c.ga_population = static_cast<int>(as_integer(value, key));
        else if (key == "ga_generations") c.ga_generations = static_cast<int>(as_integer(value, key));
        else if (key == "ga_selection_q") c.ga_selection_q = as_number(value, key);
        else if (key == "ga_mutation_b") c.ga_mutation_b = as_number(value, key);
        else if (key == "ga_crossover_count") c.ga_crossover_count = static_cast<int>(as_integer(value, key));
        else if (key == "ga_mutation_count") c.ga_mutation_count = static_cast<int>(as_integer(value, key));
        else if (key == "seed") {
            if (!value.is_number_unsigned())
                throw ConfigError("config key 'seed' must be a nonnegative integer");
            c.seed = value.get<std::uint64_t>();
        } else if (key == "train_fraction") c.train_fraction = as_number(value, key);
        else if (key == "validation_fraction") c.validation_fraction = as_number(value, key);
        else if (key == "test_fraction") c.test_fraction = as_number(value, key);
        else if (key == "target_variables") {
            if (!value.is_array())
                throw ConfigError("config key 'target_variables' must be an array of names");
            c.target_variables.clear();
            for (const auto& name : value)
                c.target_variables.push_back(as_string(name, key));
        } else if (key == "tolerances") {
            if (!value.is_object())
                throw ConfigError("config key 'tolerances' must map variable names to numbers");
            c.tolerances.clear();
            for (const auto& [name, tol] : value.items())
                c.tolerances[name] = as_number(tol, "tolerances." + name);
        } else if (key == "runs") c.runs = static_cast<int>(as_integer(value, key));
        else if (key == "records_per_run") c.records_per_run = as_integer(value, key);
        else if (key == "out_dir") c.out_dir = as_string(value, key);
        else if (key == "workers") c.workers = static_cast<int>(as_integer(value, key));
        else if (key == "verbose") {
            if (!value.is_boolean())
                throw ConfigError("config key 'verbose' must be a boolean");
            c.verbose = value.get<bool>();
        } else {
            throw ConfigError(source + " has unknown config key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string config_json(const RunConfig& config) {
    // Result-affecting fields only; out_dir, workers, and verbose cannot
    // change artifact content. json objects keep keys sorted, so the dump
    // is canonical.
    json j;
    j["schema_path"] = config.schema_path;
    j["variant"] = config.variant;
    j["hidden_count"] = config.hidden_count;
    j["max_cycles"] = config.max_cycles;
    j["patience"] = config.patience;
    j["pca_k"] = config.pca_k;
    j["svr_width_low"] = config.svr_width_low;
    j["svr_width_high"] = config.svr_width_high;
    j["svr_reg_low"] = config.svr_reg_low;
    j["svr_reg_high"] = config.svr_reg_high;
    j["svr_subsample"] = config.svr_subsample;
    j["svr_tune_population"] = config.svr_tune_population;
    j["svr_tune_generations"] = config.svr_tune_generations;
    j["ga_population"] = config.ga_population;
    j["ga_generations"] = config.ga_generations;
    j["ga_selection_q"] = config.ga_selection_q;
    j["ga_mutation_b"] = config.ga_mutation_b;
    j["ga_crossover_count"] = config.ga_crossover_count;
    j["ga_mutation_count"] = config.ga_mutation_count;
    j["seed"] = config.seed;
    j["train_fraction"] = config.train_fraction;
    j["validation_fraction"] = config.validation_fraction;
    j["test_fraction"] = config.test_fraction;
    j["target_variables"] = config.target_variables;
    j["tolerances"] = config.tolerances;
    j["runs"] = config.runs;
    j["records_per_run"] = config.records_per_run;
    return j.dump(2);
}

std::string config_hash(const RunConfig& config) {
    std::string text = config_json(config);
    std::uint64_t h =
        fnv1a(reinterpret_cast<const unsigned char*>(text.data()), text.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace gafill
