#pragma once

#include <cstddef>
#include <vector>

#include "pdfshield/document.hpp"

namespace pdfshield {

enum class TokenKind {
    Operator,
    Number,
    LiteralString,
    HexString,
    Name,
    ArrayOpen,
    ArrayClose,
    DictOpen,
    DictClose,
    Boolean,
    Null,
    Comment,
    InlineImage,
};

/// One lexical unit of a page content stream.
///
/// `raw` holds the exact source bytes so an unedited token re-serializes
/// without drift; `text` is the decoded payload (string bytes, name without
/// the slash, operator spelling).
struct ContentToken {
    TokenKind kind = TokenKind::Operator;
    Bytes raw;
    Bytes text;
    double number = 0.0;
    bool flag = false;  // boolean tokens

    bool is_op(const char* name) const {
        return kind == TokenKind::Operator && text == name;
    }
    friend bool operator==(const ContentToken& a, const ContentToken& b) {
        return a.kind == b.kind && a.raw == b.raw;
    }
};

using TokenSeq = std::vector<ContentToken>;

/// Lex a fully decoded content stream. Every byte lands in exactly one token
/// or inter-token whitespace; inline images (BI..ID..EI) come back as one
/// opaque token; comments are preserved verbatim.
TokenSeq tokenize(const Bytes& decoded);

/// Inverse of tokenize up to whitespace: emits each token's raw bytes with a
/// single separating space (newline after comments).
Bytes serialize_tokens(const TokenSeq& tokens);

// Token constructors used when building new content.
ContentToken op_token(const std::string& name);
ContentToken number_token(double v);
ContentToken string_token(const Bytes& payload);
ContentToken hex_string_token(const Bytes& payload);
ContentToken hex_string_token_from_hex(const std::string& hex_digits);
ContentToken name_token(const std::string& name);
ContentToken array_open_token();
ContentToken array_close_token();
ContentToken dict_open_token();
ContentToken dict_close_token();

/// Per-page token sequence plus provenance.
struct PageStream {
    int page_index = 0;          // 0-based
    int page_object = 0;         // indirect object number
    TokenSeq tokens;
    int source_stream_count = 0; // /Contents streams before consolidation
};

/// Throws UnbalancedOperators unless BT/ET and q/Q pair up.
void check_balance(const TokenSeq& tokens);

/// Positions between tokens that sit outside every BT..ET span, at zero
/// q/Q nesting relative to stream start, and on an operator boundary. Always
/// contains the stream start and end.
std::vector<size_t> find_insertion_points(const PageStream& stream);

/// Decode and concatenate a page's /Contents streams.
/// Only /FlateDecode or unfiltered streams are accepted.
PageStream load_page_stream(const Document& doc, int page_object, int page_index);

/// Replace the page's /Contents with a single FlateDecode stream holding the
/// serialized tokens. All other page keys are untouched.
void consolidate_and_repack(Document& doc, int page_object, const TokenSeq& edited_tokens);

}  // namespace pdfshield
