#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdfshield/content.hpp"
#include "pdfshield/fonts.hpp"

namespace pdfshield {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Row-major 2x2 text matrix: {h1, h2, h3, h4}.
struct Mat2 {
    double h1 = 1.0, h2 = 0.0, h3 = 0.0, h4 = 1.0;
    bool is_axis_aligned() const { return h2 == 0.0 && h3 == 0.0; }
};

/// Replay state: cursor position, text matrix, active font resource and base
/// size. BT resets position and matrix; the font assignment survives it.
struct TextStateVector {
    Vec2 position;
    Mat2 matrix;
    std::string font_resource;
    double font_size = 0.0;
    double leading = 0.0;  // tracked for TD / TL so T* can be normalized
};

/// One shown run of text with the geometry in effect when it was shown.
struct TextSegment {
    Vec2 position;             // segment start, user-space units
    Bytes text;                // shown bytes
    std::string font_resource;
    double base_size = 0.0;
    double effective_size = 0.0;  // base size scaled by max(|h1|,|h4|)
    double width = 0.0;           // physical width, user-space units
    Mat2 matrix;                  // text matrix at show time
    int rendering_mode = 0;
    bool rotated = false;       // matrix had shear terms; size is approximate
    bool missing_font = false;  // widths fell back to defaults
    size_t first_token = 0;     // token span of operands + show operator
    size_t last_token = 0;      // inclusive
    size_t char_count = 0;
};

/// Apply one operator (with operands) to the state. Operators outside
/// {Tf, Tm, Td, TD, TL, BT} leave the state unchanged.
TextStateVector step(const TextStateVector& state, const ContentToken& op,
                     std::span<const ContentToken> operands);

/// Width of a shown string or TJ array in user-space units:
/// (sum of glyph advances minus kerning, both in thousandths) x effective size.
double segment_width(std::span<const ContentToken> show_operands, const FontMetrics& font,
                     double effective_size);

/// Replay a page and collect one segment per show operator, in stream order.
std::vector<TextSegment> extract_segments(const PageStream& stream, const FontMap& fonts);

/// The (resource, size) pair showing the most characters; ties break on
/// lexicographic resource name, then the smaller size. Size is grouped and
/// reported at two decimals.
std::pair<std::string, double> dominant_font(const std::vector<TextSegment>& segments);

}  // namespace pdfshield
