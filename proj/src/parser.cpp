#include "pdfshield/parser.hpp"

#include <cctype>
#include <cstdlib>

#include "pdfshield/errors.hpp"

namespace pdfshield {

bool is_pdf_whitespace(unsigned char c) {
    return c == 0x00 || c == 0x09 || c == 0x0a || c == 0x0c || c == 0x0d || c == 0x20;
}

bool is_pdf_delimiter(unsigned char c) {
    switch (c) {
        case '(': case ')': case '<': case '>': case '[': case ']':
        case '{': case '}': case '/': case '%':
            return true;
        default:
            return false;
    }
}

static bool is_regular(unsigned char c) {
    return !is_pdf_whitespace(c) && !is_pdf_delimiter(c);
}

void ObjectScanner::skip_ws() {
    while (pos_ < data_.size()) {
        unsigned char c = data_[pos_];
        if (is_pdf_whitespace(c)) {
            ++pos_;
        } else if (c == '%') {
            while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r')
                ++pos_;
        } else {
            break;
        }
    }
}

bool ObjectScanner::peek_keyword(const char* kw) const {
    size_t n = 0;
    while (kw[n])
        ++n;
    if (pos_ + n > data_.size())
        return false;
    if (data_.compare(pos_, n, kw) != 0)
        return false;
    // must end at a token boundary
    if (pos_ + n < data_.size() && is_regular(data_[pos_ + n]))
        return false;
    return true;
}

bool ObjectScanner::accept_keyword(const char* kw) {
    if (!peek_keyword(kw))
        return false;
    while (*kw) {
        ++pos_;
        ++kw;
    }
    return true;
}

std::optional<std::int64_t> ObjectScanner::parse_uint() {
    skip_ws();
    if (pos_ >= data_.size() || !std::isdigit(static_cast<unsigned char>(data_[pos_])))
        return std::nullopt;
    std::int64_t v = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_])))
        v = v * 10 + (data_[pos_++] - '0');
    return v;
}

Object ObjectScanner::parse_number_or_ref() {
    size_t start = pos_;
    bool is_real = false;
    if (data_[pos_] == '+' || data_[pos_] == '-')
        ++pos_;
    while (pos_ < data_.size()) {
        unsigned char c = data_[pos_];
        if (std::isdigit(c)) {
            ++pos_;
        } else if (c == '.') {
            is_real = true;
            ++pos_;
        } else {
            break;
        }
    }
    Bytes text = data_.substr(start, pos_ - start);
    if (!is_real) {
        // integer: look ahead for "G R" making this a reference
        std::int64_t number = std::strtoll(text.c_str(), nullptr, 10);
        size_t save = pos_;
        skip_ws();
        std::optional<std::int64_t> gen = parse_uint();
        if (gen) {
            skip_ws();
            if (accept_keyword("R"))
                return Object(Reference{static_cast<int>(number), static_cast<int>(*gen)});
        }
        pos_ = save;
        return Object(number);
    }
    return Object(std::strtod(text.c_str(), nullptr));
}

Object ObjectScanner::parse_literal_string() {
    ++pos_;  // consume '('
    Bytes out;
    int depth = 1;
    while (pos_ < data_.size()) {
        char c = data_[pos_++];
        if (c == '\\') {
            if (pos_ >= data_.size())
                throw UnbalancedString("literal string ends in backslash");
            char e = data_[pos_++];
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 'r': out.push_back('\r'); break;
                case 't': out.push_back('\t'); break;
                case 'b': out.push_back('\b'); break;
                case 'f': out.push_back('\f'); break;
                case '(': out.push_back('('); break;
                case ')': out.push_back(')'); break;
                case '\\': out.push_back('\\'); break;
                case '\r':
                    if (pos_ < data_.size() && data_[pos_] == '\n')
                        ++pos_;
                    break;  // line continuation
                case '\n':
                    break;
                default:
                    if (e >= '0' && e <= '7') {
                        int v = e - '0';
                        for (int i = 0; i < 2 && pos_ < data_.size() && data_[pos_] >= '0' &&
                                        data_[pos_] <= '7';
                             ++i)
                            v = v * 8 + (data_[pos_++] - '0');
                        out.push_back(static_cast<char>(v & 0xff));
                    } else {
                        out.push_back(e);  // unknown escape: keep the char
                    }
            }
        } else if (c == '(') {
            ++depth;
            out.push_back(c);
        } else if (c == ')') {
            if (--depth == 0)
                return Object(String{std::move(out), false});
            out.push_back(c);
        } else if (c == '\r') {
            // EOL inside strings normalizes to LF
            if (pos_ < data_.size() && data_[pos_] == '\n')
                ++pos_;
            out.push_back('\n');
        } else {
            out.push_back(c);
        }
    }
    throw UnbalancedString("unterminated literal string");
}

static int hex_value(unsigned char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

Object ObjectScanner::parse_hex_string() {
    ++pos_;  // consume '<'
    Bytes out;
    int hi = -1;
    while (pos_ < data_.size()) {
        unsigned char c = data_[pos_++];
        if (c == '>') {
            if (hi >= 0)
                out.push_back(static_cast<char>(hi << 4));
            return Object(String{std::move(out), true});
        }
        if (is_pdf_whitespace(c))
            continue;
        int v = hex_value(c);
        if (v < 0)
            throw UnbalancedString("bad character in hex string");
        if (hi < 0) {
            hi = v;
        } else {
            out.push_back(static_cast<char>((hi << 4) | v));
            hi = -1;
        }
    }
    throw UnbalancedString("unterminated hex string");
}

Name ObjectScanner::parse_name() {
    ++pos_;  // consume '/'
    std::string out;
    while (pos_ < data_.size() && is_regular(data_[pos_])) {
        char c = data_[pos_++];
        if (c == '#' && pos_ + 1 < data_.size()) {
            int a = hex_value(data_[pos_]);
            int b = hex_value(data_[pos_ + 1]);
            if (a >= 0 && b >= 0) {
                out.push_back(static_cast<char>((a << 4) | b));
                pos_ += 2;
                continue;
            }
        }
        out.push_back(c);
    }
    return Name{std::move(out)};
}

Object ObjectScanner::parse_array() {
    ++pos_;  // consume '['
    Array arr;
    while (true) {
        skip_ws();
        if (pos_ >= data_.size())
            throw ParseError("unterminated array");
        if (data_[pos_] == ']') {
            ++pos_;
            return Object(std::move(arr));
        }
        arr.push_back(parse_object());
    }
}

Object ObjectScanner::parse_dict() {
    pos_ += 2;  // consume '<<'
    Dict d;
    while (true) {
        skip_ws();
        if (pos_ >= data_.size())
            throw ParseError("unterminated dictionary");
        if (data_[pos_] == '>' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
            pos_ += 2;
            return Object(std::move(d));
        }
        if (data_[pos_] != '/')
            throw ParseError("dictionary key is not a name");
        Name key = parse_name();
        skip_ws();
        d.set(key.value, parse_object());
    }
}

Object ObjectScanner::parse_object() {
    skip_ws();
    if (pos_ >= data_.size())
        throw ParseError("unexpected end of data");
    unsigned char c = data_[pos_];
    if (c == '<') {
        if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<')
            return parse_dict();
        return parse_hex_string();
    }
    if (c == '(')
        return parse_literal_string();
    if (c == '/')
        return Object(parse_name());
    if (c == '[')
        return parse_array();
    if (std::isdigit(c) || c == '+' || c == '-' || c == '.')
        return parse_number_or_ref();
    if (accept_keyword("true"))
        return Object(true);
    if (accept_keyword("false"))
        return Object(false);
    if (accept_keyword("null"))
        return Object::null();
    throw ParseError("unrecognized object syntax at offset " + std::to_string(pos_));
}

}  // namespace pdfshield
