#pragma once

#include <cstddef>
#include <optional>

#include "pdfshield/object.hpp"

namespace pdfshield {

bool is_pdf_whitespace(unsigned char c);
bool is_pdf_delimiter(unsigned char c);

/// Cursor over raw PDF bytes that parses object syntax. Stream extents are
/// the document layer's job; parse_object() stops after the stream dict.
class ObjectScanner {
public:
    explicit ObjectScanner(const Bytes& data, size_t pos = 0) : data_(data), pos_(pos) {}

    size_t pos() const { return pos_; }
    void seek(size_t p) { pos_ = p; }
    bool eof() const { return pos_ >= data_.size(); }
    const Bytes& data() const { return data_; }

    void skip_ws();

    /// Consume `kw` if the cursor sits exactly on it (token-delimited).
    bool accept_keyword(const char* kw);

    /// Peek without consuming.
    bool peek_keyword(const char* kw) const;

    Object parse_object();

    /// Parse an unsigned integer token; returns nullopt if the cursor is not
    /// on a digit.
    std::optional<std::int64_t> parse_uint();

private:
    Object parse_number_or_ref();
    Object parse_literal_string();
    Object parse_hex_string();
    Name parse_name();
    Object parse_array();
    Object parse_dict();

    const Bytes& data_;
    size_t pos_;
};

}  // namespace pdfshield
