#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace talenti::cli {

/**
 * Minimal JSON emitter with caller-controlled key order and %.17g floats.
 * Reports built with it are byte-identical across runs for identical inputs,
 * which a generic serializer's key ordering would not guarantee.
 */
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& name);
    JsonWriter& value(double v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& value(bool v);
    JsonWriter& value_size(std::size_t v);
    JsonWriter& value(const std::vector<double>& v);

    // Object convenience: key then value.
    template <typename T>
    JsonWriter& field(const std::string& name, const T& v) {
        key(name);
        return value(v);
    }
    JsonWriter& field_size(const std::string& name, std::size_t v) {
        key(name);
        return value_size(v);
    }

    const std::string& str() const { return out_; }

private:
    void separate();
    static std::string escape(const std::string& s);

    std::string out_;
    std::vector<bool> first_stack_;
    bool pending_key_ = false;
};

}
