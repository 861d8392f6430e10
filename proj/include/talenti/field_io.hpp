#pragma once

#include <string>
#include <variant>

#include "talenti/field.hpp"

namespace talenti {

// Shortest decimal form that round-trips a double (printf %.17g).
std::string format_g17(double x);

// Writes content to path via a sibling temp file plus rename, so a crash or
// error never leaves a partial file at path.
void write_text_atomic(const std::string& path, const std::string& content);

/**
 * Field file format, one header line then one row per time level:
 *
 *   # R=<float> d=<int> T=<float> n_t=<int> n_r=<int> kind=<control|state|adjoint>
 *   <v>,<v>,...,<v>
 *
 * Rows hold n_r comma-separated cell values; there are n_t + 1 rows. A file
 * with n_t=0 carries a single radial field (T is written as 0 and ignored).
 * Values are written with %.17g and round-trip exactly.
 */
void save_field(const RadialField& f, const std::string& path);
void save_field(const SpaceTimeField& f, const std::string& path);

// Loads either flavor depending on the header's n_t.
std::variant<RadialField, SpaceTimeField> load_field(const std::string& path);

// Loads and requires n_t = 0.
RadialField load_radial_field(const std::string& path);

// Loads and requires n_t >= 1.
SpaceTimeField load_spacetime_field(const std::string& path);

}
