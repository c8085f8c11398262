#include "tailnorm/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "tailnorm/errors.hpp"

namespace tailnorm {

JsonValue JsonValue::array_of(const std::vector<double>& xs) {
    JsonValue v = array();
    for (double x : xs) v.push(JsonValue(x));
    return v;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
    if (kind_ != Kind::object) throw input_error("JsonValue::set on a non-object");
    obj_.emplace_back(key, std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    if (kind_ != Kind::array) throw input_error("JsonValue::push on a non-array");
    arr_.push_back(std::move(v));
    return *this;
}

std::string JsonValue::format_number(double v) {
    if (std::isnan(v)) throw input_error("NaN reached the JSON writer");
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {
void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}
} // namespace

void JsonValue::write(std::string& out, int indent, int depth) const {
    auto newline = [&](int d) {
        if (indent <= 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (kind_) {
        case Kind::null: out += "null"; break;
        case Kind::boolean: out += bool_ ? "true" : "false"; break;
        case Kind::number: out += format_number(num_); break;
        case Kind::integer: {
            char buf[24];
            std::snprintf(buf, sizeof buf, "%lld", int_);
            out += buf;
            break;
        }
        case Kind::string: write_escaped(out, str_); break;
        case Kind::array: {
            if (arr_.empty()) { out += "[]"; break; }
            out += '[';
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                newline(depth + 1);
                arr_[i].write(out, indent, depth + 1);
                if (i + 1 < arr_.size()) out += ',';
            }
            newline(depth);
            out += ']';
            break;
        }
        case Kind::object: {
            if (obj_.empty()) { out += "{}"; break; }
            out += '{';
            for (std::size_t i = 0; i < obj_.size(); ++i) {
                newline(depth + 1);
                write_escaped(out, obj_[i].first);
                out += indent > 0 ? ": " : ":";
                obj_[i].second.write(out, indent, depth + 1);
                if (i + 1 < obj_.size()) out += ',';
            }
            newline(depth);
            out += '}';
            break;
        }
    }
}

std::string JsonValue::dump(int indent) const {
    std::string out;
    write(out, indent, 0);
    if (indent > 0) out += '\n';
    return out;
}

} // namespace tailnorm
