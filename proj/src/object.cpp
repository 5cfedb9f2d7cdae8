#include "pdfshield/object.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pdfshield/errors.hpp"

namespace pdfshield {

bool Dict::has(const std::string& key) const { return find(key) != nullptr; }

const Object* Dict::find(const std::string& key) const {
    for (const auto& [k, v] : items_)
        if (k == key)
            return &v;
    return nullptr;
}

Object* Dict::find(const std::string& key) {
    for (auto& [k, v] : items_)
        if (k == key)
            return &v;
    return nullptr;
}

const Object& Dict::at(const std::string& key) const {
    if (const Object* o = find(key))
        return *o;
    throw ParseError("missing dictionary key /" + key);
}

void Dict::set(const std::string& key, Object value) {
    if (Object* o = find(key)) {
        *o = std::move(value);
        return;
    }
    items_.emplace_back(key, std::move(value));
}

void Dict::erase(const std::string& key) {
    items_.erase(std::remove_if(items_.begin(), items_.end(),
                                [&](const auto& kv) { return kv.first == key; }),
                 items_.end());
}

std::int64_t Object::as_int() const {
    if (is_int())
        return std::get<std::int64_t>(v_);
    if (is_real())
        return static_cast<std::int64_t>(std::get<double>(v_));
    throw ParseError("object is not a number");
}

double Object::as_real() const {
    if (is_real())
        return std::get<double>(v_);
    if (is_int())
        return static_cast<double>(std::get<std::int64_t>(v_));
    throw ParseError("object is not a number");
}

const Dict& Object::as_dict() const {
    if (is_stream())
        return std::get<Stream>(v_).dict;
    return std::get<Dict>(v_);
}

Dict& Object::as_dict() {
    if (is_stream())
        return std::get<Stream>(v_).dict;
    return std::get<Dict>(v_);
}

std::string format_real(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0')
        s.pop_back();
    if (!s.empty() && s.back() == '.')
        s.pop_back();
    return s;
}

static bool is_regular_name_char(unsigned char c) {
    if (c <= ' ' || c == 0x7f)
        return false;
    switch (c) {
        case '(': case ')': case '<': case '>': case '[': case ']':
        case '{': case '}': case '/': case '%': case '#':
            return false;
        default:
            return true;
    }
}

static Bytes serialize_name(const Name& n) {
    Bytes out = "/";
    for (unsigned char c : n.value) {
        if (is_regular_name_char(c)) {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "#%02X", c);
            out += buf;
        }
    }
    return out;
}

Bytes escape_literal_string(const Bytes& payload) {
    Bytes out = "(";
    for (unsigned char c : payload) {
        switch (c) {
            case '(': out += "\\("; break;
            case ')': out += "\\)"; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\%03o", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back(')');
    return out;
}

static Bytes serialize_string(const String& s) {
    if (s.prefer_hex) {
        static const char* hex = "0123456789ABCDEF";
        Bytes out = "<";
        for (unsigned char c : s.bytes) {
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        }
        out.push_back('>');
        return out;
    }
    return escape_literal_string(s.bytes);
}

static void serialize_into(const Object& obj, Bytes& out);

static void serialize_dict_into(const Dict& d, Bytes& out) {
    out += "<<";
    for (const auto& [k, v] : d.items()) {
        out += serialize_name(Name{k});
        out.push_back(' ');
        serialize_into(v, out);
        out.push_back(' ');
    }
    if (!d.items().empty())
        out.pop_back();
    out += ">>";
}

static void serialize_into(const Object& obj, Bytes& out) {
    std::visit(
        [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                out += "null";
            } else if constexpr (std::is_same_v<T, bool>) {
                out += v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                out += std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                out += format_real(v);
            } else if constexpr (std::is_same_v<T, String>) {
                out += serialize_string(v);
            } else if constexpr (std::is_same_v<T, Name>) {
                out += serialize_name(v);
            } else if constexpr (std::is_same_v<T, Array>) {
                out.push_back('[');
                for (size_t i = 0; i < v.size(); ++i) {
                    if (i)
                        out.push_back(' ');
                    serialize_into(v[i], out);
                }
                out.push_back(']');
            } else if constexpr (std::is_same_v<T, Dict>) {
                serialize_dict_into(v, out);
            } else if constexpr (std::is_same_v<T, Stream>) {
                serialize_dict_into(v.dict, out);
                out += "\nstream\n";
                out += v.raw;
                out += "\nendstream";
            } else if constexpr (std::is_same_v<T, Reference>) {
                out += std::to_string(v.number) + " " + std::to_string(v.generation) + " R";
            }
        },
        obj.value());
}

Bytes serialize_object(const Object& obj) {
    Bytes out;
    serialize_into(obj, out);
    return out;
}

}  // namespace pdfshield
