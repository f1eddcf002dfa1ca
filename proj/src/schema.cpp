#include "gafill/schema.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "gafill/errors.hpp"

namespace gafill {

using nlohmann::json;

std::string to_string(VariableKind kind) {
    switch (kind) {
        case VariableKind::Binary: return "binary";
        case VariableKind::Integer: return "integer";
        case VariableKind::Continuous: return "continuous";
    }
    return "unknown";
}

VariableKind variable_kind_from_string(const std::string& s) {
    if (s == "binary") return VariableKind::Binary;
    if (s == "integer") return VariableKind::Integer;
    if (s == "continuous") return VariableKind::Continuous;
    throw ConfigError("unknown variable kind '" + s + "'");
}

std::optional<int> VariableSpec::code_for(const std::string& category) const {
    for (const auto& [key, code] : lookup)
        if (key == category) return code;
    return std::nullopt;
}

void VariableSpec::validate() const {
    if (name.empty())
        throw ConfigError("variable with empty name");
    if (kind == VariableKind::Binary) {
        if (min != 0.0 || max != 1.0)
            throw ConfigError("binary variable '" + name + "' must have range [0, 1]");
    } else if (!(min < max)) {
        throw ConfigError("variable '" + name + "' needs min < max");
    }
    std::set<int> codes;
    for (const auto& [key, code] : lookup) {
        if (!codes.insert(code).second)
            throw ConfigError("variable '" + name + "' has duplicate lookup code " +
                              std::to_string(code));
        if (code < min || code > max)
            throw ConfigError("variable '" + name + "' lookup code " +
                              std::to_string(code) + " outside [min, max]");
    }
}

int DatasetSchema::index_of(const std::string& name) const {
    for (int j = 0; j < dimension(); ++j)
        if (variables[j].name == name) return j;
    return -1;
}

void DatasetSchema::validate() const {
    if (variables.empty())
        throw ConfigError("schema has no variables");
    std::set<std::string> names;
    for (const auto& v : variables) {
        v.validate();
        if (!names.insert(v.name).second)
            throw ConfigError("duplicate variable name '" + v.name + "'");
    }
}

DatasetSchema reference_schema() {
    DatasetSchema s;
    s.variables = {
        {"HIV Status", VariableKind::Binary, 0, 1, {}},
        {"Education", VariableKind::Integer, 0, 13, {}},
        {"Age Group", VariableKind::Integer, 14, 60, {}},
        {"Age Gap", VariableKind::Integer, 1, 7, {}},
        {"Gravidity", VariableKind::Integer, 0, 11, {}},
        {"Parity", VariableKind::Integer, 0, 40, {}},
        {"Race", VariableKind::Integer, 1, 5, {}},
        {"Province",
         VariableKind::Integer,
         1,
         9,
         {{"Gauteng", 1},
          {"Eastern Cape", 2},
          {"Free State", 3},
          {"KwaZulu-Natal", 4},
          {"Mpumalanga", 5},
          {"North West", 6},
          {"Northern Cape", 7},
          {"Northern Province", 8},
          {"Western Cape", 9}}},
        {"Region", VariableKind::Integer, 1, 36, {}},
        {"RPR", VariableKind::Integer, 0, 2, {}},
        {"WTREV", VariableKind::Continuous, 0.638, 1.2743, {}},
    };
    return s;
}

DatasetSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open schema file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("schema file " + path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array())
        throw ConfigError("schema file " + path + " must contain a 'variables' array");

    DatasetSchema schema;
    for (const auto& entry : doc["variables"]) {
        VariableSpec v;
        try {
            v.name = entry.at("name").get<std::string>();
            v.kind = variable_kind_from_string(entry.at("kind").get<std::string>());
            if (v.kind == VariableKind::Binary) {
                v.min = 0.0;
                v.max = 1.0;
            } else {
                v.min = entry.at("min").get<double>();
                v.max = entry.at("max").get<double>();
            }
            if (entry.contains("lookup")) {
                for (const auto& [key, code] : entry["lookup"].items())
                    v.lookup.emplace_back(key, code.get<int>());
            }
        } catch (const json::exception& e) {
            throw ConfigError("schema file " + path + ": bad variable entry: " + e.what());
        }
        schema.variables.push_back(std::move(v));
    }
    schema.validate();
    return schema;
}

void save_schema(const DatasetSchema& schema, const std::string& path) {
    json doc;
    doc["variables"] = json::array();
    for (const auto& v : schema.variables) {
        json entry;
        entry["name"] = v.name;
        entry["kind"] = to_string(v.kind);
        entry["min"] = v.min;
        entry["max"] = v.max;
        if (!v.lookup.empty()) {
            json lk = json::object();
            for (const auto& [key, code] : v.lookup) lk[key] = code;
            entry["lookup"] = lk;
        }
        doc["variables"].push_back(entry);
    }
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write schema file: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace gafill
