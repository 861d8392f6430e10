#include "cli/run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "cli/json_writer.hpp"
#include "talenti/errors.hpp"

namespace talenti::cli {

RunConfig load_config(const std::string& path, RunConfig defaults) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open config");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(path + ": config must be a JSON object");

    RunConfig cfg = defaults;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "R")
                cfg.R = value.get<double>();
            else if (key == "d")
                cfg.d = value.get<int>();
            else if (key == "T")
                cfg.T = value.get<double>();
            else if (key == "V0_fraction")
                cfg.V0_fraction = value.get<double>();
            else if (key == "n_r")
                cfg.n_r = value.get<std::size_t>();
            else if (key == "n_t")
                cfg.n_t = value.get<std::size_t>();
            else if (key == "scheme")
                cfg.scheme = scheme_from_string(value.get<std::string>());
            else if (key == "seed")
                cfg.seed = value.get<std::uint64_t>();
            else
                throw ParseError(path + ": unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    cfg.check();
    return cfg;
}

void write_config(JsonWriter& w, const RunConfig& config) {
    w.begin_object()
        .field("R", config.R)
        .field_size("d", static_cast<std::size_t>(config.d))
        .field("T", config.T)
        .field("V0_fraction", config.V0_fraction)
        .field_size("n_r", config.n_r)
        .field_size("n_t", config.n_t)
        .field("scheme", to_string(config.scheme))
        .field_size("seed", static_cast<std::size_t>(config.seed))
        .end_object();
}

std::string config_json(const RunConfig& config) {
    JsonWriter w;
    write_config(w, config);
    return w.str();
}

}
