#pragma once

#include <map>
#include <string>

#include "pdfshield/document.hpp"

namespace pdfshield {

/// Glyph advance widths for one font resource, in thousandths of a text unit.
struct FontMetrics {
    std::string resource_name;
    std::map<int, double> glyph_widths;
    double default_width = 500.0;
    bool two_byte_codes = false;  // Type0 composite fonts

    double width_of_code(int code) const {
        auto it = glyph_widths.find(code);
        return it == glyph_widths.end() ? default_width : it->second;
    }

    /// Sum of advances for a shown string, still in thousandths.
    double width_of_bytes(const Bytes& s) const;
};

using FontMap = std::map<std::string, FontMetrics>;

/// Metrics for the built-in base-14 faces we know about (Helvetica,
/// Times-Roman, Courier and their aliases). Returns false if unknown.
bool base14_widths(const std::string& base_font, std::map<int, double>& out);

/// Read every font in the page's (possibly inherited) /Resources /Font dict.
FontMap load_page_fonts(const Document& doc, int page_object);

}  // namespace pdfshield
