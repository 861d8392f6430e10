#include "cli/json_writer.hpp"

#include <cmath>

#include "talenti/errors.hpp"
#include "talenti/field_io.hpp"

namespace talenti::cli {

void JsonWriter::separate() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_stack_.empty()) {
        if (!first_stack_.back()) out_ += ',';
        first_stack_.back() = false;
    }
}

std::string JsonWriter::escape(const std::string& s) {
    std::string r;
    r.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': r += "\\\""; break;
            case '\\': r += "\\\\"; break;
            case '\n': r += "\\n"; break;
            case '\t': r += "\\t"; break;
            case '\r': r += "\\r"; break;
            default: r += c;
        }
    }
    return r;
}

JsonWriter& JsonWriter::begin_object() {
    separate();
    out_ += '{';
    first_stack_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    first_stack_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separate();
    out_ += '[';
    first_stack_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    first_stack_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
    separate();
    out_ += '"';
    out_ += escape(name);
    out_ += "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    if (!std::isfinite(v)) throw NumericalError("JsonWriter: non-finite value for key path near '" +
                                               out_.substr(out_.size() > 40 ? out_.size() - 40 : 0) +
                                               "'");
    separate();
    out_ += format_g17(v);
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    separate();
    out_ += '"';
    out_ += escape(v);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    separate();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value_size(std::size_t v) {
    separate();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(const std::vector<double>& v) {
    begin_array();
    for (double x : v) value(x);
    return end_array();
}

}
