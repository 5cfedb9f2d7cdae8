#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pdfshield/flate.hpp"

namespace pdfshield {

class Object;

/// PDF name (e.g. /Contents). Stored without the leading slash, escapes decoded.
struct Name {
    std::string value;
    friend bool operator==(const Name& a, const Name& b) { return a.value == b.value; }
};

/// PDF string. `bytes` is the decoded payload; `prefer_hex` controls serialization.
struct String {
    Bytes bytes;
    bool prefer_hex = false;
    friend bool operator==(const String& a, const String& b) { return a.bytes == b.bytes; }
};

struct Reference {
    int number = 0;
    int generation = 0;
    friend bool operator==(const Reference& a, const Reference& b) {
        return a.number == b.number && a.generation == b.generation;
    }
};

/// Insertion-order-preserving dictionary. PDF dictionaries are small, so
/// lookups are linear.
class Dict {
public:
    using Items = std::vector<std::pair<std::string, Object>>;

    bool has(const std::string& key) const;
    const Object* find(const std::string& key) const;
    Object* find(const std::string& key);
    const Object& at(const std::string& key) const;
    void set(const std::string& key, Object value);
    void erase(const std::string& key);

    Items& items() { return items_; }
    const Items& items() const { return items_; }
    bool empty() const { return items_.empty(); }

private:
    Items items_;
};

struct Stream {
    Dict dict;
    Bytes raw;  // encoded bytes exactly as stored in the file
};

using Array = std::vector<Object>;

/// One PDF object: the usual variant over the ISO 32000 basic types.
class Object {
public:
    using Value = std::variant<std::monostate, bool, std::int64_t, double, String,
                               Name, Array, Dict, Stream, Reference>;

    Object() = default;
    Object(bool b) : v_(b) {}
    Object(int i) : v_(static_cast<std::int64_t>(i)) {}
    Object(std::int64_t i) : v_(i) {}
    Object(double d) : v_(d) {}
    Object(String s) : v_(std::move(s)) {}
    Object(Name n) : v_(std::move(n)) {}
    Object(Array a) : v_(std::move(a)) {}
    Object(Dict d) : v_(std::move(d)) {}
    Object(Stream s) : v_(std::move(s)) {}
    Object(Reference r) : v_(r) {}

    static Object null() { return Object(); }
    static Object name(std::string n) { return Object(Name{std::move(n)}); }
    static Object string(Bytes b) { return Object(String{std::move(b), false}); }

    bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_real() const { return std::holds_alternative<double>(v_); }
    bool is_number() const { return is_int() || is_real(); }
    bool is_string() const { return std::holds_alternative<String>(v_); }
    bool is_name() const { return std::holds_alternative<Name>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }
    bool is_dict() const { return std::holds_alternative<Dict>(v_); }
    bool is_stream() const { return std::holds_alternative<Stream>(v_); }
    bool is_reference() const { return std::holds_alternative<Reference>(v_); }

    bool as_bool() const { return std::get<bool>(v_); }
    std::int64_t as_int() const;
    double as_real() const;
    const String& as_string() const { return std::get<String>(v_); }
    const Name& as_name() const { return std::get<Name>(v_); }
    const Array& as_array() const { return std::get<Array>(v_); }
    Array& as_array() { return std::get<Array>(v_); }
    const Dict& as_dict() const;
    Dict& as_dict();
    const Stream& as_stream() const { return std::get<Stream>(v_); }
    Stream& as_stream() { return std::get<Stream>(v_); }
    Reference as_reference() const { return std::get<Reference>(v_); }

    const Value& value() const { return v_; }
    Value& value() { return v_; }

private:
    Value v_;
};

/// Serialize an object body (without obj/endobj wrapper).
Bytes serialize_object(const Object& obj);

/// Format a real number the way the writer does: trailing zeros trimmed,
/// at most six fractional digits.
std::string format_real(double v);

/// Escape a byte payload as a PDF literal string, including delimiters.
Bytes escape_literal_string(const Bytes& payload);

}  // namespace pdfshield
