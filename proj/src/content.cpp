#include "pdfshield/content.hpp"

#include <cctype>
#include <cstdlib>

#include "pdfshield/errors.hpp"
#include "pdfshield/parser.hpp"

namespace pdfshield {

namespace {

bool is_regular(unsigned char c) {
    return !is_pdf_whitespace(c) && !is_pdf_delimiter(c);
}

// Finds the end of an inline image's binary payload: EI delimited by
// whitespace on the left and a token boundary on the right.
size_t find_inline_image_end(const Bytes& data, size_t from) {
    size_t pos = from;
    while (pos + 1 < data.size()) {
        size_t hit = data.find("EI", pos);
        if (hit == Bytes::npos)
            return Bytes::npos;
        bool left_ok = hit == 0 || is_pdf_whitespace(data[hit - 1]);
        bool right_ok = hit + 2 >= data.size() || !is_regular(data[hit + 2]);
        if (left_ok && right_ok)
            return hit + 2;
        pos = hit + 2;
    }
    return Bytes::npos;
}

class ContentLexer {
public:
    explicit ContentLexer(const Bytes& data) : data_(data) {}

    TokenSeq run() {
        TokenSeq out;
        while (true) {
            skip_ws();
            if (pos_ >= data_.size())
                break;
            out.push_back(next());
            // BI starts an inline image: re-capture from the operator start
            // through EI as one opaque token.
            if (out.back().is_op("BI")) {
                size_t bi_start = pos_ - 2;
                size_t end = find_inline_image_end(data_, pos_);
                if (end == Bytes::npos)
                    throw TruncatedStream("inline image without EI terminator");
                ContentToken img;
                img.kind = TokenKind::InlineImage;
                img.raw = data_.substr(bi_start, end - bi_start);
                img.text = img.raw;
                out.back() = std::move(img);
                pos_ = end;
            }
        }
        return out;
    }

private:
    void skip_ws() {
        while (pos_ < data_.size() && is_pdf_whitespace(data_[pos_]))
            ++pos_;
    }

    ContentToken next() {
        size_t start = pos_;
        unsigned char c = data_[pos_];
        ContentToken t;
        switch (c) {
            case '%': {
                while (pos_ < data_.size() && data_[pos_] != '\r' && data_[pos_] != '\n')
                    ++pos_;
                t.kind = TokenKind::Comment;
                t.raw = data_.substr(start, pos_ - start);
                t.text = t.raw;
                return t;
            }
            case '(': {
                ObjectScanner sc(data_, pos_);
                Object s = sc.parse_object();
                pos_ = sc.pos();
                t.kind = TokenKind::LiteralString;
                t.raw = data_.substr(start, pos_ - start);
                t.text = s.as_string().bytes;
                return t;
            }
            case '<': {
                if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
                    pos_ += 2;
                    t.kind = TokenKind::DictOpen;
                    t.raw = "<<";
                    return t;
                }
                ObjectScanner sc(data_, pos_);
                Object s = sc.parse_object();
                pos_ = sc.pos();
                t.kind = TokenKind::HexString;
                t.raw = data_.substr(start, pos_ - start);
                t.text = s.as_string().bytes;
                return t;
            }
            case '>': {
                if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
                    pos_ += 2;
                    t.kind = TokenKind::DictClose;
                    t.raw = ">>";
                    return t;
                }
                throw TruncatedStream("stray > in content stream");
            }
            case '[':
                ++pos_;
                t.kind = TokenKind::ArrayOpen;
                t.raw = "[";
                return t;
            case ']':
                ++pos_;
                t.kind = TokenKind::ArrayClose;
                t.raw = "]";
                return t;
            case '/': {
                ObjectScanner sc(data_, pos_);
                Object n = sc.parse_object();
                pos_ = sc.pos();
                t.kind = TokenKind::Name;
                t.raw = data_.substr(start, pos_ - start);
                t.text = n.as_name().value;
                return t;
            }
            case ')':
                throw UnbalancedString("stray ) in content stream");
            case '{':
            case '}':
                // PostScript procedure braces: preserved as one-char operators.
                ++pos_;
                t.kind = TokenKind::Operator;
                t.raw = Bytes(1, static_cast<char>(c));
                t.text = t.raw;
                return t;
            default:
                break;
        }

        if (std::isdigit(c) || c == '+' || c == '-' || c == '.') {
            ++pos_;
            while (pos_ < data_.size()) {
                unsigned char d = data_[pos_];
                if (std::isdigit(d) || d == '.' || d == '+' || d == '-')
                    ++pos_;
                else
                    break;
            }
            t.kind = TokenKind::Number;
            t.raw = data_.substr(start, pos_ - start);
            t.number = std::strtod(t.raw.c_str(), nullptr);
            return t;
        }

        // Operator / keyword: run of regular characters.
        while (pos_ < data_.size() && is_regular(data_[pos_]))
            ++pos_;
        Bytes word = data_.substr(start, pos_ - start);
        if (word == "true" || word == "false") {
            t.kind = TokenKind::Boolean;
            t.flag = word == "true";
        } else if (word == "null") {
            t.kind = TokenKind::Null;
        } else {
            t.kind = TokenKind::Operator;
        }
        t.raw = word;
        t.text = word;
        return t;
    }

    const Bytes& data_;
    size_t pos_ = 0;
};

}  // namespace

TokenSeq tokenize(const Bytes& decoded) { return ContentLexer(decoded).run(); }

Bytes serialize_tokens(const TokenSeq& tokens) {
    Bytes out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        out += tokens[i].raw;
        if (i + 1 < tokens.size())
            out.push_back(tokens[i].kind == TokenKind::Comment ? '\n' : ' ');
    }
    return out;
}

ContentToken op_token(const std::string& name) {
    ContentToken t;
    t.kind = TokenKind::Operator;
    t.raw = name;
    t.text = name;
    return t;
}

ContentToken number_token(double v) {
    ContentToken t;
    t.kind = TokenKind::Number;
    t.raw = format_real(v);
    t.number = v;
    return t;
}

ContentToken string_token(const Bytes& payload) {
    ContentToken t;
    t.kind = TokenKind::LiteralString;
    t.raw = escape_literal_string(payload);
    t.text = payload;
    return t;
}

ContentToken hex_string_token(const Bytes& payload) {
    static const char* hex = "0123456789ABCDEF";
    ContentToken t;
    t.kind = TokenKind::HexString;
    t.raw = "<";
    for (unsigned char c : payload) {
        t.raw.push_back(hex[c >> 4]);
        t.raw.push_back(hex[c & 0xf]);
    }
    t.raw.push_back('>');
    t.text = payload;
    return t;
}

ContentToken hex_string_token_from_hex(const std::string& hex_digits) {
    ContentToken t;
    t.kind = TokenKind::HexString;
    t.raw = "<" + hex_digits + ">";
    t.text.reserve(hex_digits.size() / 2);
    for (size_t i = 0; i + 1 < hex_digits.size(); i += 2) {
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw BadActualTextHex("bad hex digit");
        };
        t.text.push_back(static_cast<char>((nibble(hex_digits[i]) << 4) |
                                           nibble(hex_digits[i + 1])));
    }
    return t;
}

ContentToken name_token(const std::string& name) {
    ContentToken t;
    t.kind = TokenKind::Name;
    t.raw = serialize_object(Object::name(name));
    t.text = name;
    return t;
}

ContentToken array_open_token() {
    ContentToken t;
    t.kind = TokenKind::ArrayOpen;
    t.raw = "[";
    return t;
}

ContentToken array_close_token() {
    ContentToken t;
    t.kind = TokenKind::ArrayClose;
    t.raw = "]";
    return t;
}

ContentToken dict_open_token() {
    ContentToken t;
    t.kind = TokenKind::DictOpen;
    t.raw = "<<";
    return t;
}

ContentToken dict_close_token() {
    ContentToken t;
    t.kind = TokenKind::DictClose;
    t.raw = ">>";
    return t;
}

void check_balance(const TokenSeq& tokens) {
    int q_depth = 0;
    int bt_depth = 0;
    for (const ContentToken& t : tokens) {
        if (t.kind != TokenKind::Operator)
            continue;
        if (t.text == "q") {
            ++q_depth;
        } else if (t.text == "Q") {
            if (--q_depth < 0)
                throw UnbalancedOperators("Q without matching q");
        } else if (t.text == "BT") {
            if (++bt_depth > 1)
                throw UnbalancedOperators("nested BT");
        } else if (t.text == "ET") {
            if (--bt_depth < 0)
                throw UnbalancedOperators("ET without matching BT");
        }
    }
    if (q_depth != 0)
        throw UnbalancedOperators("unclosed q");
    if (bt_depth != 0)
        throw UnbalancedOperators("unclosed BT");
}

std::vector<size_t> find_insertion_points(const PageStream& stream) {
    check_balance(stream.tokens);
    const TokenSeq& toks = stream.tokens;
    std::vector<size_t> points;
    int q_depth = 0;
    int bt_depth = 0;
    points.push_back(0);
    for (size_t i = 0; i < toks.size(); ++i) {
        const ContentToken& t = toks[i];
        if (t.kind == TokenKind::Operator) {
            if (t.text == "q")
                ++q_depth;
            else if (t.text == "Q")
                --q_depth;
            else if (t.text == "BT")
                ++bt_depth;
            else if (t.text == "ET")
                --bt_depth;
        }
        // Candidate position i+1 sits right after token i. Requiring an
        // operator boundary keeps an injected object from splitting another
        // operator's operand list.
        bool boundary = t.kind == TokenKind::Operator || t.kind == TokenKind::Comment ||
                        t.kind == TokenKind::InlineImage;
        if (i + 1 < toks.size() && boundary && q_depth == 0 && bt_depth == 0)
            points.push_back(i + 1);
    }
    if (points.empty() || points.back() != toks.size())
        points.push_back(toks.size());
    return points;
}

PageStream load_page_stream(const Document& doc, int page_object, int page_index) {
    const Object* page = doc.get(page_object);
    if (!page)
        throw MalformedContents("no such page object");
    const Object* contents = page->as_dict().find("Contents");
    PageStream ps;
    ps.page_index = page_index;
    ps.page_object = page_object;
    if (!contents) {
        ps.source_stream_count = 0;
        return ps;
    }
    const Object& c = doc.resolve(*contents);
    Bytes joined;
    auto append_stream = [&](const Object& streamish) {
        const Object& s = doc.resolve(streamish);
        if (!s.is_stream())
            throw MalformedContents("/Contents entry is not a stream");
        if (!joined.empty())
            joined.push_back('\n');
        joined += doc.decode_stream(s.as_stream());
        ++ps.source_stream_count;
    };
    if (c.is_stream()) {
        append_stream(c);
    } else if (c.is_array()) {
        for (const Object& e : c.as_array())
            append_stream(e);
    } else {
        throw MalformedContents("/Contents is neither stream nor array");
    }
    ps.tokens = tokenize(joined);
    return ps;
}

void consolidate_and_repack(Document& doc, int page_object, const TokenSeq& edited_tokens) {
    check_balance(edited_tokens);
    Bytes serialized = serialize_tokens(edited_tokens);
    Reference ref = doc.add_object(Document::make_flate_stream(serialized));
    Object* page = doc.get(page_object);
    if (!page)
        throw MalformedContents("no such page object");
    page->as_dict().set("Contents", Object(ref));
}

}  // namespace pdfshield
