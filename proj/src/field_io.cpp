#include "talenti/field_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "talenti/errors.hpp"

namespace talenti {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(path + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw IoError(path + ": write failed");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError(path + ": rename failed: " + std::strerror(errno));
    }
}

namespace {

std::string header_line(const RadialGrid& grid, double horizon, std::size_t n_t, FieldKind kind) {
    std::ostringstream os;
    os << "# R=" << format_g17(grid.radius()) << " d=" << grid.dim()
       << " T=" << format_g17(horizon) << " n_t=" << n_t << " n_r=" << grid.n_cells()
       << " kind=" << to_string(kind);
    return os.str();
}

void append_row(std::string& out, const double* row, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        if (j) out += ',';
        out += format_g17(row[j]);
    }
    out += '\n';
}

struct Header {
    double radius = 0.0;
    int dim = 0;
    double horizon = 0.0;
    std::size_t n_t = 0;
    std::size_t n_r = 0;
    FieldKind kind = FieldKind::state;
};

double parse_double_token(const std::string& path, const std::string& tok, const char* key) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
        throw ParseError(path + ": header value '" + tok + "' for " + key + " is not a finite number");
    return v;
}

std::size_t parse_size_token(const std::string& path, const std::string& tok, const char* key) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError(path + ": header value '" + tok + "' for " + key + " is not an integer");
    return static_cast<std::size_t>(v);
}

Header parse_header(const std::string& path, const std::string& line) {
    if (line.size() < 2 || line[0] != '#' || line[1] != ' ')
        throw ParseError(path + ": first line must be the '# R=... kind=...' header");
    std::istringstream is(line.substr(2));
    const char* keys[] = {"R", "d", "T", "n_t", "n_r", "kind"};
    std::string values[6];
    for (int k = 0; k < 6; ++k) {
        std::string tok;
        if (!(is >> tok))
            throw ParseError(path + ": header is missing '" + keys[k] + "='");
        std::string prefix = std::string(keys[k]) + "=";
        if (tok.rfind(prefix, 0) != 0)
            throw ParseError(path + ": header token '" + tok + "' where '" + prefix +
                             "...' was expected");
        values[k] = tok.substr(prefix.size());
    }
    std::string extra;
    if (is >> extra) throw ParseError(path + ": unexpected header token '" + extra + "'");

    Header h;
    h.radius = parse_double_token(path, values[0], "R");
    long long dim = static_cast<long long>(parse_size_token(path, values[1], "d"));
    h.dim = static_cast<int>(dim);
    h.horizon = parse_double_token(path, values[2], "T");
    h.n_t = parse_size_token(path, values[3], "n_t");
    h.n_r = parse_size_token(path, values[4], "n_r");
    try {
        h.kind = field_kind_from_string(values[5]);
    } catch (const DomainError& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!(h.radius > 0.0)) throw ParseError(path + ": header R must be positive");
    if (h.dim < 1 || h.dim > 10) throw ParseError(path + ": header d out of range [1, 10]");
    if (h.n_r < 2) throw ParseError(path + ": header n_r must be at least 2");
    if (h.n_t >= 1 && !(h.horizon > 0.0))
        throw ParseError(path + ": header T must be positive when n_t >= 1");
    return h;
}

void parse_row(const std::string& path, const std::string& line, std::size_t row_index,
               FieldKind kind, std::size_t n_r, double* out) {
    const char* p = line.c_str();
    std::string where = path + ": row " + std::to_string(row_index + 2);
    for (std::size_t j = 0; j < n_r; ++j) {
        char* end = nullptr;
        double v = std::strtod(p, &end);
        if (end == p)
            throw ParseError(where + ", column " + std::to_string(j + 1) + ": expected a number");
        if (!std::isfinite(v))
            throw ParseError(where + ", column " + std::to_string(j + 1) + ": non-finite value");
        if (kind == FieldKind::control && (v < 0.0 || v > 1.0))
            throw ParseError(where + ", column " + std::to_string(j + 1) + ": control value " +
                             format_g17(v) + " outside [0, 1]");
        out[j] = v;
        p = end;
        if (j + 1 < n_r) {
            if (*p != ',')
                throw ParseError(where + ", column " + std::to_string(j + 1) +
                                 ": expected ',' after value");
            ++p;
        }
    }
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p != '\0') throw ParseError(where + ": trailing content after " + std::to_string(n_r) +
                                     " values");
}

}

void save_field(const RadialField& f, const std::string& path) {
    validate(f, "save_field");
    std::string out = header_line(f.grid, 0.0, 0, f.kind);
    out += '\n';
    append_row(out, f.values.data(), f.grid.n_cells());
    write_text_atomic(path, out);
}

void save_field(const SpaceTimeField& f, const std::string& path) {
    validate(f, "save_field");
    std::string out = header_line(f.grid, f.tgrid.horizon(), f.tgrid.n_steps(), f.kind);
    out += '\n';
    out.reserve(out.size() + f.values.size() * 20);
    for (std::size_t n = 0; n < f.tgrid.n_levels(); ++n)
        append_row(out, f.slice(n), f.grid.n_cells());
    write_text_atomic(path, out);
}

std::variant<RadialField, SpaceTimeField> load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Header h = parse_header(path, line);

    RadialGrid grid(h.radius, h.dim, h.n_r);
    std::size_t n_rows = h.n_t + 1;
    std::vector<double> values(n_rows * h.n_r);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row >= n_rows)
            throw ParseError(path + ": more than " + std::to_string(n_rows) + " data rows");
        parse_row(path, line, row, h.kind, h.n_r, values.data() + row * h.n_r);
        ++row;
    }
    if (row != n_rows)
        throw ParseError(path + ": found " + std::to_string(row) + " data rows, expected " +
                         std::to_string(n_rows));

    if (h.n_t == 0) return RadialField{grid, h.kind, std::move(values)};
    TimeGrid tgrid(h.horizon, h.n_t);
    return SpaceTimeField{grid, tgrid, h.kind, std::move(values)};
}

RadialField load_radial_field(const std::string& path) {
    auto any = load_field(path);
    if (auto* f = std::get_if<RadialField>(&any)) return std::move(*f);
    throw ParseError(path + ": expected a radial field file (n_t=0)");
}

SpaceTimeField load_spacetime_field(const std::string& path) {
    auto any = load_field(path);
    if (auto* f = std::get_if<SpaceTimeField>(&any)) return std::move(*f);
    throw ParseError(path + ": expected a space-time field file (n_t >= 1)");
}

}
