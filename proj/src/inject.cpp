#include "pdfshield/inject.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pdfshield/errors.hpp"

namespace pdfshield {

const char* mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::VisualDeception: return "visual-deception";
        case Mechanism::MicroPixel: return "micropixel";
        case Mechanism::LayerCake: return "layer-cake";
    }
    return "?";
}

std::size_t InjectionReport::count(Mechanism m) const {
    std::size_t n = 0;
    for (const InjectedObject& o : objects)
        n += o.mechanism == m ? 1 : 0;
    return n;
}

// ---------------------------------------------------------------------------
// Token assembly helpers

namespace {

std::array<double, 4> media_box(const Document& doc, int page_object) {
    std::array<double, 4> box{0.0, 0.0, 612.0, 792.0};
    if (const Object* mb = doc.page_attr(page_object, "MediaBox")) {
        const Object& a = doc.resolve(*mb);
        if (a.is_array() && a.as_array().size() == 4)
            for (int i = 0; i < 4; ++i)
                box[static_cast<size_t>(i)] = doc.resolve(a.as_array()[static_cast<size_t>(i)]).as_real();
    }
    return box;
}

void append_bdc_prefix(TokenSeq& out, const std::string& hex) {
    out.push_back(name_token("Span"));
    out.push_back(dict_open_token());
    out.push_back(name_token("ActualText"));
    out.push_back(hex_string_token_from_hex(hex));
    out.push_back(dict_close_token());
    out.push_back(op_token("BDC"));
}

// Last top-level non-stroking color assignment before `before_idx`; falls
// back to plain black. Replicating it keeps a relocated text object painting
// in the color the original ran under.
TokenSeq fill_color_tokens(const TokenSeq& toks, size_t before_idx) {
    int q_depth = 0;
    TokenSeq colorspace;
    TokenSeq color;
    TokenSeq operands;
    for (size_t i = 0; i < before_idx && i < toks.size(); ++i) {
        const ContentToken& t = toks[i];
        if (t.kind != TokenKind::Operator) {
            if (t.kind != TokenKind::Comment && t.kind != TokenKind::InlineImage)
                operands.push_back(t);
            continue;
        }
        if (t.text == "q") {
            ++q_depth;
        } else if (t.text == "Q") {
            --q_depth;
        } else if (q_depth == 0) {
            if (t.text == "cs") {
                colorspace = operands;
                colorspace.push_back(t);
            } else if (t.text == "g" || t.text == "rg" || t.text == "k" ||
                       t.text == "sc" || t.text == "scn") {
                color = operands;
                color.push_back(t);
            }
        }
        operands.clear();
    }
    TokenSeq out = colorspace;
    if (color.empty()) {
        out.push_back(number_token(0));
        out.push_back(op_token("g"));
    } else {
        out.insert(out.end(), color.begin(), color.end());
    }
    return out;
}

void remove_spans(TokenSeq& toks, std::vector<std::pair<size_t, size_t>> spans) {
    std::sort(spans.begin(), spans.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [first, last] : spans) {
        if (first <= last && last < toks.size())
            toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(first),
                       toks.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    }
}

void splice_inserts(TokenSeq& toks, std::vector<std::pair<size_t, TokenSeq>> inserts) {
    std::stable_sort(inserts.begin(), inserts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = inserts.rbegin(); it != inserts.rend(); ++it)
        toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(it->first),
                    it->second.begin(), it->second.end());
}

size_t pick_insertion_point(const PageStream& ps, Rng& rng) {
    std::vector<size_t> points = find_insertion_points(ps);
    if (points.empty())
        throw NoInsertionPoints("stream offers no graphics-state-neutral points");
    return points[rng.below(points.size())];
}

std::string concat_payloads(const std::vector<std::string>& members,
                            const std::vector<std::size_t>& ids) {
    std::string out;
    for (std::size_t id : ids) {
        if (!out.empty())
            out.push_back(' ');
        out += members[id];
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Anchor filtering and payload partitioning

std::vector<TextSegment> filter_anchors(const std::vector<TextSegment>& segments,
                                        const LayoutSpec& spec) {
    std::vector<TextSegment> out;
    for (const TextSegment& a : segments) {
        if (std::abs(a.width - spec.w_target) > spec.epsilon * spec.w_target)
            continue;
        bool in_column = false;
        for (const auto& [lo, hi] : spec.columns)
            in_column = in_column || (a.position.x >= lo && a.position.x <= hi);
        if (!in_column)
            continue;
        if (a.position.y < spec.y_min || a.position.y > spec.y_max)
            continue;
        out.push_back(a);
    }
    return out;
}

std::vector<std::string> partition_payload(const std::string& payload, double anchor_width,
                                           const FontMetrics& font, double effective_size) {
    if (effective_size <= 0.0)
        throw ZeroWidthFont("effective font size must be positive");
    if (!payload.empty() && font.width_of_bytes(payload) == 0.0)
        throw ZeroWidthFont("font metrics give the payload zero width");
    std::vector<std::string> blocks;
    size_t i = 0;
    const size_t n = payload.size();
    while (i < n) {
        double w = 0.0;
        size_t j = i;
        size_t last_space = 0;  // split point just after a space
        while (j < n) {
            double cw = font.width_of_code(static_cast<unsigned char>(payload[j])) /
                        1000.0 * effective_size;
            if (w + cw > anchor_width)
                break;
            w += cw;
            ++j;
            if (payload[j - 1] == ' ')
                last_space = j;
        }
        if (j >= n) {
            blocks.push_back(payload.substr(i));
            break;
        }
        if (j == i)
            ++j;  // a single glyph wider than the anchor still has to land somewhere
        size_t split = last_space > i ? last_space : j;
        blocks.push_back(payload.substr(i, split - i));
        i = split;
    }
    return blocks;
}

// ---------------------------------------------------------------------------
// Visual deception

InjectionReport inject_visual_deception(Document& doc, const PayloadPool& pool,
                                        const LayoutSpec& spec, const InjectOptions& opt) {
    if (!spec.vd_anchor)
        throw MissingLayoutElement("layout spec has no designated element region");
    InjectionReport report;
    report.seed = opt.seed;
    report.ratio = opt.ratio;
    report.mechanism = mechanism_name(Mechanism::VisualDeception);

    std::vector<std::string> members = pool.members();
    if (members.empty())
        throw EmptyPool("payload pool is empty");
    Rng rng(opt.seed);

    std::vector<int> pages = doc.pages();
    int selected_pages = 0;
    for (size_t pi = 0; pi < pages.size(); ++pi) {
        PageStream ps = load_page_stream(doc, pages[pi], static_cast<int>(pi));
        bool selected = rng.bernoulli(opt.ratio);
        if (!selected) {
            consolidate_and_repack(doc, pages[pi], ps.tokens);
            continue;
        }
        ++selected_pages;
        FontMap fonts = load_page_fonts(doc, pages[pi]);
        std::vector<TextSegment> segs = extract_segments(ps, fonts);
        std::vector<TextSegment> element;
        for (const TextSegment& s : segs)
            if (spec.vd_anchor->contains(s.position.x, s.position.y))
                element.push_back(s);
        if (element.empty()) {
            report.pages_skipped.push_back(static_cast<int>(pi));
            consolidate_and_repack(doc, pages[pi], ps.tokens);
            continue;
        }

        auto ids = sample_payload_ids(members.size(),
                                      static_cast<size_t>(opt.vd_payloads_per_page), rng);
        std::string denoised = denoise_serialize(concat_payloads(members, ids));
        EncodedPayload encoded = encode_actual_text(denoised);

        TokenSeq obj;
        append_bdc_prefix(obj, encoded.hex);
        obj.push_back(op_token("q"));
        TokenSeq color = fill_color_tokens(ps.tokens, element.front().first_token);
        obj.insert(obj.end(), color.begin(), color.end());
        obj.push_back(op_token("BT"));
        for (const TextSegment& s : element) {
            obj.push_back(name_token(s.font_resource));
            obj.push_back(number_token(s.base_size));
            obj.push_back(op_token("Tf"));
            obj.push_back(number_token(s.matrix.h1));
            obj.push_back(number_token(s.matrix.h2));
            obj.push_back(number_token(s.matrix.h3));
            obj.push_back(number_token(s.matrix.h4));
            obj.push_back(number_token(s.position.x));
            obj.push_back(number_token(s.position.y));
            obj.push_back(op_token("Tm"));
            for (size_t t = s.first_token; t <= s.last_token; ++t)
                obj.push_back(ps.tokens[t]);
        }
        obj.push_back(op_token("ET"));
        obj.push_back(op_token("Q"));
        obj.push_back(op_token("EMC"));

        TokenSeq edited = ps.tokens;
        std::vector<std::pair<size_t, size_t>> spans;
        for (const TextSegment& s : element)
            spans.emplace_back(s.first_token, s.last_token);
        remove_spans(edited, spans);

        PageStream edited_ps = ps;
        edited_ps.tokens = edited;
        size_t point = pick_insertion_point(edited_ps, rng);
        splice_inserts(edited, {{point, obj}});
        consolidate_and_repack(doc, pages[pi], edited);

        InjectedObject rec;
        rec.mechanism = Mechanism::VisualDeception;
        rec.page_index = static_cast<int>(pi);
        rec.x = element.front().position.x;
        rec.y = element.front().position.y;
        rec.payload_ids.assign(ids.begin(), ids.end());
        rec.payload_text = denoised;
        rec.font_resource = element.front().font_resource;
        rec.font_size = element.front().base_size;
        rec.rendering_mode = 0;
        rec.actual_text_wrapped = true;
        report.objects.push_back(std::move(rec));
    }

    if (selected_pages > 0 && report.objects.empty())
        throw MissingLayoutElement("no page contains the designated layout element");
    return report;
}

// ---------------------------------------------------------------------------
// MicroPixel

namespace {

std::string ensure_micropixel_font(Document& doc, int page_object, const FontMap& fonts,
                                   Reference& cached_font, bool& cached) {
    if (!fonts.empty())
        return fonts.begin()->first;
    if (!cached) {
        Dict f;
        f.set("Type", Object::name("Font"));
        f.set("Subtype", Object::name("Type1"));
        f.set("BaseFont", Object::name("Helvetica"));
        cached_font = doc.add_object(Object(f));
        cached = true;
    }
    // Clone inherited resources onto the page so the addition stays local.
    Dict resources;
    if (const Object* res = doc.page_attr(page_object, "Resources")) {
        const Object& rd = doc.resolve(*res);
        if (rd.is_dict())
            resources = rd.as_dict();
    }
    Dict font_dict;
    if (const Object* fd = resources.find("Font")) {
        const Object& f = doc.resolve(*fd);
        if (f.is_dict())
            font_dict = f.as_dict();
    }
    font_dict.set("PSF0", Object(cached_font));
    resources.set("Font", Object(font_dict));
    doc.get(page_object)->as_dict().set("Resources", Object(resources));
    return "PSF0";
}

}  // namespace

InjectionReport inject_micropixel(Document& doc, const PayloadPool& pool,
                                  const InjectOptions& opt) {
    InjectionReport report;
    report.seed = opt.seed;
    report.ratio = opt.ratio;
    report.mechanism = mechanism_name(Mechanism::MicroPixel);

    std::vector<std::string> members = pool.members();
    if (members.empty())
        throw EmptyPool("payload pool is empty");
    Rng rng(opt.seed);
    Reference cached_font{};
    bool cached = false;

    std::vector<int> pages = doc.pages();
    for (size_t pi = 0; pi < pages.size(); ++pi) {
        PageStream ps = load_page_stream(doc, pages[pi], static_cast<int>(pi));
        FontMap fonts = load_page_fonts(doc, pages[pi]);
        auto box = media_box(doc, pages[pi]);

        std::vector<std::pair<size_t, TokenSeq>> inserts;
        std::string font_name;
        for (int j = 0; j < opt.micropixel_per_page; ++j) {
            if (!rng.bernoulli(opt.ratio))
                continue;
            if (font_name.empty())
                font_name = ensure_micropixel_font(doc, pages[pi], fonts, cached_font, cached);
            std::size_t id = sample_payload_ids(members.size(), 1, rng)[0];
            std::string denoised = denoise_serialize(members[id]);
            EncodedPayload encoded = encode_actual_text(denoised);
            double x = box[0] + rng.unit() * (box[2] - box[0]);
            double y = box[1] + rng.unit() * (box[3] - box[1]);

            TokenSeq obj;
            append_bdc_prefix(obj, encoded.hex);
            obj.push_back(op_token("BT"));
            obj.push_back(name_token(font_name));
            obj.push_back(number_token(1));
            obj.push_back(op_token("Tf"));
            obj.push_back(number_token(1));
            obj.push_back(number_token(0));
            obj.push_back(number_token(0));
            obj.push_back(number_token(1));
            obj.push_back(number_token(x));
            obj.push_back(number_token(y));
            obj.push_back(op_token("Tm"));
            obj.push_back(string_token(" "));
            obj.push_back(op_token("Tj"));
            obj.push_back(op_token("ET"));
            obj.push_back(op_token("EMC"));

            inserts.emplace_back(pick_insertion_point(ps, rng), std::move(obj));

            InjectedObject rec;
            rec.mechanism = Mechanism::MicroPixel;
            rec.page_index = static_cast<int>(pi);
            rec.x = x;
            rec.y = y;
            rec.payload_ids = {id};
            rec.payload_text = denoised;
            rec.font_resource = font_name;
            rec.font_size = 1.0;
            rec.rendering_mode = 0;
            rec.actual_text_wrapped = true;
            report.objects.push_back(std::move(rec));
        }

        TokenSeq edited = ps.tokens;
        splice_inserts(edited, std::move(inserts));
        consolidate_and_repack(doc, pages[pi], edited);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Layer cake

InjectionReport inject_layer_cake(Document& doc, const PayloadPool& pool,
                                  const LayoutSpec& spec, const InjectOptions& opt) {
    InjectionReport report;
    report.seed = opt.seed;
    report.ratio = opt.ratio;
    report.mechanism = mechanism_name(Mechanism::LayerCake);

    std::vector<std::string> members = pool.members();
    if (members.empty())
        throw EmptyPool("payload pool is empty");
    Rng rng(opt.seed);

    std::vector<int> pages = doc.pages();
    for (size_t pi = 0; pi < pages.size(); ++pi) {
        PageStream ps = load_page_stream(doc, pages[pi], static_cast<int>(pi));
        FontMap fonts = load_page_fonts(doc, pages[pi]);
        std::vector<TextSegment> segs = extract_segments(ps, fonts);
        std::vector<TextSegment> anchors = filter_anchors(segs, spec);
        if (anchors.empty()) {
            report.pages_skipped.push_back(static_cast<int>(pi));
            consolidate_and_repack(doc, pages[pi], ps.tokens);
            continue;
        }
        auto [dom_font, dom_size] = dominant_font(segs);
        FontMetrics metrics;
        if (auto it = fonts.find(dom_font); it != fonts.end())
            metrics = it->second;

        std::vector<std::pair<size_t, TokenSeq>> inserts;
        for (const TextSegment& anchor : anchors) {
            if (!rng.bernoulli(opt.ratio))
                continue;
            std::size_t id = sample_payload_ids(members.size(), 1, rng)[0];
            std::string denoised = denoise_serialize(members[id]);
            std::vector<std::string> blocks =
                partition_payload(denoised, anchor.width, metrics, dom_size);

            TokenSeq obj;
            obj.push_back(op_token("BT"));
            obj.push_back(name_token(dom_font));
            obj.push_back(number_token(dom_size));
            obj.push_back(op_token("Tf"));
            obj.push_back(number_token(3));
            obj.push_back(op_token("Tr"));
            double leading = 1.2 * dom_size;
            for (size_t k = 0; k < blocks.size(); ++k) {
                obj.push_back(number_token(1));
                obj.push_back(number_token(0));
                obj.push_back(number_token(0));
                obj.push_back(number_token(1));
                obj.push_back(number_token(anchor.position.x));
                obj.push_back(number_token(anchor.position.y - static_cast<double>(k) * leading));
                obj.push_back(op_token("Tm"));
                obj.push_back(string_token(blocks[k]));
                obj.push_back(op_token("Tj"));
            }
            obj.push_back(op_token("ET"));
            inserts.emplace_back(pick_insertion_point(ps, rng), std::move(obj));

            InjectedObject rec;
            rec.mechanism = Mechanism::LayerCake;
            rec.page_index = static_cast<int>(pi);
            rec.x = anchor.position.x;
            rec.y = anchor.position.y;
            rec.payload_ids = {id};
            rec.payload_text = denoised;
            rec.font_resource = dom_font;
            rec.font_size = dom_size;
            rec.rendering_mode = 3;
            rec.actual_text_wrapped = false;
            report.objects.push_back(std::move(rec));
        }

        TokenSeq edited = ps.tokens;
        splice_inserts(edited, std::move(inserts));
        consolidate_and_repack(doc, pages[pi], edited);
    }
    return report;
}

InjectionReport inject_ensemble(Document& doc, const PayloadPool& pool,
                                const LayoutSpec& spec, const InjectOptions& opt) {
    InjectOptions o = opt;
    InjectionReport vd = inject_visual_deception(doc, pool, spec, o);
    o.seed = opt.seed + 1;
    InjectionReport mp = inject_micropixel(doc, pool, o);
    o.seed = opt.seed + 2;
    InjectionReport lc = inject_layer_cake(doc, pool, spec, o);

    InjectionReport out;
    out.seed = opt.seed;
    out.ratio = opt.ratio;
    out.mechanism = "ensemble";
    auto absorb = [&out](InjectionReport& r) {
        out.objects.insert(out.objects.end(), r.objects.begin(), r.objects.end());
    };
    absorb(vd);
    absorb(mp);
    absorb(lc);
    out.pages_skipped = lc.pages_skipped;
    return out;
}

// ---------------------------------------------------------------------------
// Report serialization

std::string InjectionReport::to_json() const {
    nlohmann::json j;
    j["mechanism"] = mechanism;
    j["seed"] = seed;
    j["ratio"] = ratio;
    nlohmann::json objs = nlohmann::json::array();
    for (const InjectedObject& o : objects) {
        nlohmann::json jo;
        jo["mechanism"] = mechanism_name(o.mechanism);
        jo["page"] = o.page_index;
        jo["x"] = o.x;
        jo["y"] = o.y;
        jo["payload_ids"] = o.payload_ids;
        jo["payload_text"] = o.payload_text;
        jo["font"] = o.font_resource;
        jo["size"] = o.font_size;
        jo["rendering_mode"] = o.rendering_mode;
        jo["actual_text"] = o.actual_text_wrapped;
        objs.push_back(std::move(jo));
    }
    j["objects"] = std::move(objs);
    j["pages_skipped"] = pages_skipped;
    j["counts"] = {{"visual-deception", count(Mechanism::VisualDeception)},
                   {"micropixel", count(Mechanism::MicroPixel)},
                   {"layer-cake", count(Mechanism::LayerCake)}};
    return j.dump(2);
}

InjectionReport InjectionReport::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    InjectionReport r;
    r.mechanism = j.value("mechanism", "");
    r.seed = j.value("seed", static_cast<std::uint64_t>(0));
    r.ratio = j.value("ratio", 1.0);
    for (const auto& jo : j.value("objects", nlohmann::json::array())) {
        InjectedObject o;
        std::string m = jo.value("mechanism", "layer-cake");
        o.mechanism = m == "visual-deception" ? Mechanism::VisualDeception
                      : m == "micropixel"     ? Mechanism::MicroPixel
                                              : Mechanism::LayerCake;
        o.page_index = jo.value("page", 0);
        o.x = jo.value("x", 0.0);
        o.y = jo.value("y", 0.0);
        if (jo.contains("payload_ids"))
            o.payload_ids = jo["payload_ids"].get<std::vector<std::size_t>>();
        o.payload_text = jo.value("payload_text", "");
        o.font_resource = jo.value("font", "");
        o.font_size = jo.value("size", 0.0);
        o.rendering_mode = jo.value("rendering_mode", 0);
        o.actual_text_wrapped = jo.value("actual_text", false);
        r.objects.push_back(std::move(o));
    }
    if (j.contains("pages_skipped"))
        r.pages_skipped = j["pages_skipped"].get<std::vector<int>>();
    return r;
}

InjectionReport InjectionReport::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingFile("cannot open report " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

}  // namespace pdfshield
