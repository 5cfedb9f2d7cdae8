#include "pdfshield/fonts.hpp"

#include <array>

namespace pdfshield {

double FontMetrics::width_of_bytes(const Bytes& s) const {
    double total = 0.0;
    if (two_byte_codes) {
        for (size_t i = 0; i + 1 < s.size(); i += 2) {
            int code = (static_cast<unsigned char>(s[i]) << 8) |
                       static_cast<unsigned char>(s[i + 1]);
            total += width_of_code(code);
        }
        if (s.size() % 2)
            total += default_width;
    } else {
        for (unsigned char c : s)
            total += width_of_code(c);
    }
    return total;
}

namespace {

// AFM advance widths for ASCII 32..126.
constexpr std::array<int, 95> kHelvetica = {
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333,
    278, 278, 556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 278, 278,
    584, 584, 584, 556, 1015, 667, 667, 722, 722, 667, 611, 778, 722, 278,
    500, 667, 556, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944,
    667, 667, 611, 278, 278, 278, 469, 556, 333, 556, 556, 500, 556, 556,
    278, 556, 556, 222, 222, 500, 222, 833, 556, 556, 556, 556, 333, 500,
    278, 556, 500, 722, 500, 500, 500, 334, 260, 334, 584};

constexpr std::array<int, 95> kTimesRoman = {
    250, 333, 408, 500, 500, 833, 778, 180, 333, 333, 500, 564, 250, 333,
    250, 278, 500, 500, 500, 500, 500, 500, 500, 500, 500, 500, 278, 278,
    564, 564, 564, 444, 921, 722, 667, 667, 722, 611, 556, 722, 722, 333,
    389, 722, 611, 889, 722, 722, 556, 722, 667, 556, 611, 722, 722, 944,
    722, 722, 611, 333, 278, 333, 469, 500, 333, 444, 500, 444, 500, 444,
    333, 500, 500, 278, 278, 500, 278, 778, 500, 500, 500, 500, 333, 389,
    278, 500, 500, 722, 500, 500, 444, 480, 200, 480, 541};

constexpr std::array<int, 95> kHelveticaBold = {
    278, 333, 474, 556, 556, 889, 722, 238, 333, 333, 389, 584, 278, 333,
    278, 278, 556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 333, 333,
    584, 584, 584, 611, 975, 722, 722, 722, 722, 667, 611, 778, 722, 278,
    556, 722, 611, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944,
    667, 667, 611, 333, 278, 333, 584, 556, 333, 556, 611, 556, 611, 556,
    333, 611, 611, 278, 278, 556, 278, 889, 611, 611, 611, 611, 389, 556,
    333, 611, 556, 778, 556, 556, 500, 389, 280, 389, 584};

void fill(const std::array<int, 95>& table, std::map<int, double>& out) {
    for (int i = 0; i < 95; ++i)
        out[32 + i] = static_cast<double>(table[static_cast<size_t>(i)]);
}

std::string strip_subset_tag(const std::string& name) {
    // Embedded subsets look like ABCDEF+Helvetica.
    if (name.size() > 7 && name[6] == '+')
        return name.substr(7);
    return name;
}

}  // namespace

bool base14_widths(const std::string& base_font, std::map<int, double>& out) {
    std::string n = strip_subset_tag(base_font);
    if (n == "Helvetica" || n == "Arial") {
        fill(kHelvetica, out);
        return true;
    }
    if (n == "Helvetica-Bold" || n == "Arial-Bold" || n == "Arial,Bold") {
        fill(kHelveticaBold, out);
        return true;
    }
    if (n == "Times-Roman" || n == "TimesNewRoman" || n == "Times") {
        fill(kTimesRoman, out);
        return true;
    }
    if (n.rfind("Courier", 0) == 0) {
        for (int c = 0; c < 256; ++c)
            out[c] = 600.0;
        return true;
    }
    return false;
}

namespace {

void load_simple_widths(const Document& doc, const Dict& font, FontMetrics& fm) {
    const Object* fc = font.find("FirstChar");
    const Object* ws = font.find("Widths");
    if (fc && ws) {
        const Object& arr = doc.resolve(*ws);
        if (arr.is_array()) {
            int first = static_cast<int>(doc.resolve(*fc).as_int());
            int code = first;
            for (const Object& w : arr.as_array())
                fm.glyph_widths[code++] = doc.resolve(w).as_real();
        }
    } else if (const Object* bf = font.find("BaseFont")) {
        const Object& n = doc.resolve(*bf);
        if (n.is_name())
            base14_widths(n.as_name().value, fm.glyph_widths);
    }
    if (const Object* fd = font.find("FontDescriptor")) {
        const Object& d = doc.resolve(*fd);
        if (d.is_dict() || d.is_stream()) {
            if (const Object* mw = d.as_dict().find("MissingWidth"))
                fm.default_width = doc.resolve(*mw).as_real();
        }
    }
}

void load_type0_widths(const Document& doc, const Dict& font, FontMetrics& fm) {
    fm.two_byte_codes = true;
    // PDF default for /DW; overridden below when present.
    fm.default_width = 1000.0;
    const Object* desc = font.find("DescendantFonts");
    if (!desc)
        return;
    const Object& arr = doc.resolve(*desc);
    if (!arr.is_array() || arr.as_array().empty())
        return;
    const Object& cid = doc.resolve(arr.as_array()[0]);
    if (!cid.is_dict() && !cid.is_stream())
        return;
    const Dict& cd = cid.as_dict();
    if (const Object* dw = cd.find("DW"))
        fm.default_width = doc.resolve(*dw).as_real();
    const Object* wobj = cd.find("W");
    if (!wobj)
        return;
    const Object& w = doc.resolve(*wobj);
    if (!w.is_array())
        return;
    const Array& wa = w.as_array();
    size_t i = 0;
    while (i < wa.size()) {
        const Object& a = doc.resolve(wa[i]);
        if (!a.is_number())
            break;
        int c1 = static_cast<int>(a.as_int());
        if (i + 1 >= wa.size())
            break;
        const Object& b = doc.resolve(wa[i + 1]);
        if (b.is_array()) {
            int code = c1;
            for (const Object& e : b.as_array())
                fm.glyph_widths[code++] = doc.resolve(e).as_real();
            i += 2;
        } else if (b.is_number() && i + 2 < wa.size()) {
            int c2 = static_cast<int>(b.as_int());
            double width = doc.resolve(wa[i + 2]).as_real();
            for (int code = c1; code <= c2; ++code)
                fm.glyph_widths[code] = width;
            i += 3;
        } else {
            break;
        }
    }
}

}  // namespace

FontMap load_page_fonts(const Document& doc, int page_object) {
    FontMap out;
    const Object* res = doc.page_attr(page_object, "Resources");
    if (!res)
        return out;
    const Object& rd = doc.resolve(*res);
    if (!rd.is_dict() && !rd.is_stream())
        return out;
    const Object* fonts = rd.as_dict().find("Font");
    if (!fonts)
        return out;
    const Object& fd = doc.resolve(*fonts);
    if (!fd.is_dict())
        return out;
    for (const auto& [name, ref] : fd.as_dict().items()) {
        const Object& font = doc.resolve(ref);
        if (!font.is_dict() && !font.is_stream())
            continue;
        FontMetrics fm;
        fm.resource_name = name;
        const Dict& d = font.as_dict();
        const Object* subtype = d.find("Subtype");
        std::string st = subtype && subtype->is_name() ? subtype->as_name().value : "";
        if (st == "Type0")
            load_type0_widths(doc, d, fm);
        else
            load_simple_widths(doc, d, fm);
        out.emplace(name, std::move(fm));
    }
    return out;
}

}  // namespace pdfshield
