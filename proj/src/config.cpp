#include "bw/config.hpp"

#include <fstream>
#include <algorithm>
#include <map>
#include <sstream>

#include "bw/errors.hpp"

namespace bw {

namespace {

struct Schema {
    std::vector<std::string> required;
    std::vector<std::string> optional;
};

const std::map<std::string, Schema, std::less<>>& schemas() {
    static const std::map<std::string, Schema, std::less<>> s{
        {"gaussian", {{"sigma"}, {}}},
        {"asym_laplace", {{"lambda_r", "lambda_l"}, {}}},
        {"nig", {{"alpha", "beta", "delta"}, {"mu"}}},
    };
    return s;
}

}  // namespace

ModelPtr model_from_document(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("", "model file must hold a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "model" && key != "params") throw ConfigError(key, "unknown field");
    if (!doc.contains("model")) throw ConfigError("model", "missing");
    if (!doc["model"].is_string()) throw ConfigError("model", "must be a string");
    const std::string name = doc["model"].get<std::string>();
    const auto it = schemas().find(name);
    if (it == schemas().end())
        throw ConfigError("model", "unknown model '" + name + "' (gaussian, asym_laplace, nig)");
    if (!doc.contains("params")) throw ConfigError("params", "missing");
    const auto& params = doc["params"];
    if (!params.is_object()) throw ConfigError("params", "must be an object");

    const Schema& schema = it->second;
    std::map<std::string, double> values;
    for (const auto& [key, v] : params.items()) {
        const bool known =
            std::find(schema.required.begin(), schema.required.end(), key) != schema.required.end() ||
            std::find(schema.optional.begin(), schema.optional.end(), key) != schema.optional.end();
        if (!known) throw ConfigError("params." + key, "unknown parameter for " + name);
        if (!v.is_number()) throw ConfigError("params." + key, "must be a number");
        values[key] = v.get<double>();
    }
    for (const auto& key : schema.required)
        if (!values.count(key)) throw ConfigError("params." + key, "missing");

    try {
        if (name == "gaussian") return gaussian_model(values["sigma"]);
        if (name == "asym_laplace") return asym_laplace_model(values["lambda_r"], values["lambda_l"]);
        std::optional<double> mu;
        if (values.count("mu")) mu = values["mu"];
        return nig_model(values["alpha"], values["beta"], values["delta"], mu);
    } catch (const DomainError& e) {
        throw ConfigError("params", e.what());
    }
}

ModelPtr model_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", "malformed JSON at byte " + std::to_string(e.byte));
    }
    return model_from_document(doc);
}

ModelPtr model_from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("model", "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

nlohmann::json model_to_json(const Model& model) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : model.params()) params[k] = v;
    return {{"model", std::string(model.name())}, {"params", params}};
}

}  // namespace bw
