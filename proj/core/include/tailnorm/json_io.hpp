#pragma once

#include <string>
#include <utility>
#include <vector>

// Deterministic JSON emission: keys keep insertion order, numbers print with
// 12 significant digits, infinities print as the string "inf".  Identical
// inputs therefore produce byte-identical reports.  Parsing of config files
// is done elsewhere (vendored parser); this type is output-only.

namespace tailnorm {

class JsonValue {
public:
    enum class Kind { null, boolean, number, integer, string, array, object };

    JsonValue() : kind_(Kind::null) {}
    JsonValue(bool b) : kind_(Kind::boolean), bool_(b) {}
    JsonValue(double v) : kind_(Kind::number), num_(v) {}
    JsonValue(long long v) : kind_(Kind::integer), int_(v) {}
    JsonValue(int v) : kind_(Kind::integer), int_(v) {}
    JsonValue(std::size_t v) : kind_(Kind::integer), int_(static_cast<long long>(v)) {}
    JsonValue(const char* s) : kind_(Kind::string), str_(s) {}
    JsonValue(std::string s) : kind_(Kind::string), str_(std::move(s)) {}

    static JsonValue object() { JsonValue v; v.kind_ = Kind::object; return v; }
    static JsonValue array() { JsonValue v; v.kind_ = Kind::array; return v; }
    static JsonValue array_of(const std::vector<double>& xs);

    // object field, insertion-ordered; returns *this for chaining
    JsonValue& set(const std::string& key, JsonValue v);
    JsonValue& push(JsonValue v);

    Kind kind() const { return kind_; }
    std::string dump(int indent = 2) const;

    // formats one double the way dump() does (useful for CSV columns)
    static std::string format_number(double v);

private:
    void write(std::string& out, int indent, int depth) const;

    Kind kind_;
    bool bool_ = false;
    double num_ = 0.0;
    long long int_ = 0;
    std::string str_;
    std::vector<JsonValue> arr_;
    std::vector<std::pair<std::string, JsonValue>> obj_;
};

} // namespace tailnorm
