#pragma once

#include <string>

#include "talenti/experiments.hpp"

namespace talenti::cli {

class JsonWriter;

// Reads a JSON config ({"R", "d", "T", "V0_fraction", "n_r", "n_t",
// "scheme", "seed"}, all optional) on top of the given defaults. Unknown
// keys and wrong types are validation errors.
RunConfig load_config(const std::string& path, RunConfig defaults);

// Emits the config object into an open writer, fixed key order.
void write_config(JsonWriter& w, const RunConfig& config);

// Config echo as a standalone JSON string.
std::string config_json(const RunConfig& config);

}
