#include "pdfshield/textstate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pdfshield/errors.hpp"

namespace pdfshield {

namespace {

double require_number(const ContentToken& t, const char* op) {
    if (t.kind != TokenKind::Number)
        throw MalformedOperands(std::string(op) + ": expected numeric operand");
    return t.number;
}

}  // namespace

TextStateVector step(const TextStateVector& state, const ContentToken& op,
                     std::span<const ContentToken> operands) {
    TextStateVector next = state;
    if (op.is_op("Tf")) {
        if (operands.size() != 2 || operands[0].kind != TokenKind::Name)
            throw MalformedOperands("Tf: expected /Name size");
        next.font_resource = operands[0].text;
        next.font_size = require_number(operands[1], "Tf");
    } else if (op.is_op("Tm")) {
        if (operands.size() != 6)
            throw MalformedOperands("Tm: expected six numbers");
        double h[6];
        for (int i = 0; i < 6; ++i)
            h[i] = require_number(operands[static_cast<size_t>(i)], "Tm");
        next.matrix = Mat2{h[0], h[1], h[2], h[3]};
        next.position = Vec2{h[4], h[5]};
    } else if (op.is_op("Td") || op.is_op("TD")) {
        if (operands.size() != 2)
            throw MalformedOperands("Td: expected two numbers");
        double dx = require_number(operands[0], "Td");
        double dy = require_number(operands[1], "Td");
        const Mat2& m = state.matrix;
        next.position.x = state.position.x + m.h1 * dx + m.h3 * dy;
        next.position.y = state.position.y + m.h2 * dx + m.h4 * dy;
        if (op.is_op("TD"))
            next.leading = -dy;
    } else if (op.is_op("TL")) {
        if (operands.size() != 1)
            throw MalformedOperands("TL: expected one number");
        next.leading = require_number(operands[0], "TL");
    } else if (op.is_op("BT")) {
        next.position = Vec2{0.0, 0.0};
        next.matrix = Mat2{};
    }
    return next;
}

double segment_width(std::span<const ContentToken> show_operands, const FontMetrics& font,
                     double effective_size) {
    double advance_thousandths = 0.0;
    double kern_thousandths = 0.0;
    for (const ContentToken& t : show_operands) {
        switch (t.kind) {
            case TokenKind::LiteralString:
            case TokenKind::HexString:
                advance_thousandths += font.width_of_bytes(t.text);
                break;
            case TokenKind::Number:
                kern_thousandths += t.number;
                break;
            case TokenKind::ArrayOpen:
            case TokenKind::ArrayClose:
                break;
            default:
                throw MalformedOperands("show: unexpected operand kind");
        }
    }
    return (advance_thousandths / 1000.0 - kern_thousandths / 1000.0) * effective_size;
}

namespace {

struct Replayer {
    const TokenSeq& toks;
    const FontMap& fonts;
    std::vector<TextSegment> segments;
    TextStateVector state;
    int rendering_mode = 0;
    bool in_text_object = false;

    explicit Replayer(const PageStream& stream, const FontMap& f)
        : toks(stream.tokens), fonts(f) {}

    const FontMetrics& metrics_for(const std::string& resource, bool& missing) const {
        static const FontMetrics fallback;
        auto it = fonts.find(resource);
        if (it == fonts.end()) {
            missing = true;
            return fallback;
        }
        missing = false;
        return it->second;
    }

    void emit(std::span<const ContentToken> operands, size_t first, size_t last) {
        if (!in_text_object)
            return;
        TextSegment seg;
        seg.position = state.position;
        seg.font_resource = state.font_resource;
        seg.base_size = state.font_size;
        const Mat2& m = state.matrix;
        seg.matrix = m;
        seg.effective_size = state.font_size * std::max(std::abs(m.h1), std::abs(m.h4));
        seg.rotated = !m.is_axis_aligned();
        const FontMetrics& fm = metrics_for(state.font_resource, seg.missing_font);
        if (state.font_resource.empty())
            seg.missing_font = true;
        seg.width = segment_width(operands, fm, seg.effective_size);
        for (const ContentToken& t : operands)
            if (t.kind == TokenKind::LiteralString || t.kind == TokenKind::HexString)
                seg.text += t.text;
        seg.char_count = seg.text.size();
        seg.rendering_mode = rendering_mode;
        seg.first_token = first;
        seg.last_token = last;
        segments.push_back(std::move(seg));
    }

    void apply_tstar() {
        ContentToken td = op_token("Td");
        ContentToken zero = number_token(0.0);
        ContentToken dy = number_token(-state.leading);
        const ContentToken ops[2] = {zero, dy};
        state = step(state, td, std::span<const ContentToken>(ops, 2));
    }

    void run() {
        size_t run_start = 0;  // first token of the pending operand run
        std::vector<ContentToken> operands;
        for (size_t i = 0; i < toks.size(); ++i) {
            const ContentToken& t = toks[i];
            if (t.kind == TokenKind::Comment || t.kind == TokenKind::InlineImage) {
                operands.clear();
                run_start = i + 1;
                continue;
            }
            if (t.kind != TokenKind::Operator) {
                if (operands.empty())
                    run_start = i;
                operands.push_back(t);
                continue;
            }

            const std::string& op = t.text;
            if (op == "BT") {
                in_text_object = true;
                state = step(state, t, {});
            } else if (op == "ET") {
                in_text_object = false;
            } else if (op == "Tf" || op == "Tm" || op == "Td" || op == "TD" ||
                       op == "TL") {
                state = step(state, t, operands);
            } else if (op == "Tr") {
                if (operands.size() == 1 && operands[0].kind == TokenKind::Number)
                    rendering_mode = static_cast<int>(operands[0].number);
            } else if (op == "Tj" || op == "TJ") {
                emit(operands, run_start, i);
            } else if (op == "T*") {
                apply_tstar();
            } else if (op == "'") {
                apply_tstar();
                emit(operands, run_start, i);
            } else if (op == "\"") {
                // aw ac string ": spacing operands are not part of the width
                // model; show only the string.
                if (operands.size() == 3) {
                    apply_tstar();
                    emit(std::span<const ContentToken>(&operands[2], 1), run_start, i);
                }
            }
            operands.clear();
            run_start = i + 1;
        }
    }
};

}  // namespace

std::vector<TextSegment> extract_segments(const PageStream& stream, const FontMap& fonts) {
    Replayer r(stream, fonts);
    r.run();
    return std::move(r.segments);
}

std::pair<std::string, double> dominant_font(const std::vector<TextSegment>& segments) {
    if (segments.empty())
        throw EmptyPage("no text segments on page");
    std::map<std::pair<std::string, double>, size_t> counts;
    for (const TextSegment& s : segments) {
        double rounded = std::round(s.effective_size * 100.0) / 100.0;
        counts[{s.font_resource, rounded}] += s.char_count;
    }
    auto best = counts.begin();
    for (auto it = std::next(counts.begin()); it != counts.end(); ++it) {
        if (it->second > best->second)
            best = it;
        // counts equal: map iteration is already ordered by (name, size), so
        // the first hit wins the lexicographic/smaller-size tie-break.
    }
    return best->first;
}

}  // namespace pdfshield
