#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdfshield/layout.hpp"
#include "pdfshield/payload.hpp"
#include "pdfshield/textstate.hpp"

namespace pdfshield {

enum class Mechanism { VisualDeception, MicroPixel, LayerCake };

const char* mechanism_name(Mechanism m);

/// One serialized defensive text object, as recorded in the report.
struct InjectedObject {
    Mechanism mechanism = Mechanism::LayerCake;
    int page_index = 0;
    double x = 0.0, y = 0.0;
    std::vector<std::size_t> payload_ids;  // indices into pool.members()
    std::string payload_text;              // denoised text carried
    std::string font_resource;
    double font_size = 0.0;
    int rendering_mode = 0;
    bool actual_text_wrapped = false;
};

struct InjectionReport {
    std::uint64_t seed = 0;
    double ratio = 1.0;
    std::string mechanism;
    std::vector<InjectedObject> objects;
    std::vector<int> pages_skipped;  // no anchors / no layout element

    std::size_t count(Mechanism m) const;
    std::string to_json() const;
    static InjectionReport from_json(const std::string& text);
    static InjectionReport load(const std::string& path);
};

struct InjectOptions {
    double ratio = 1.0;
    std::uint64_t seed = 0;
    int vd_payloads_per_page = 3;  // payloads concatenated per layout object
    int micropixel_per_page = 3;
};

/// Anchors that pass the geometric width gate and the column/vertical bounds.
std::vector<TextSegment> filter_anchors(const std::vector<TextSegment>& segments,
                                        const LayoutSpec& spec);

/// Split a payload into blocks no wider than the anchor, preferring word
/// boundaries; the blocks concatenate back to the payload exactly.
std::vector<std::string> partition_payload(const std::string& payload, double anchor_width,
                                           const FontMetrics& font, double effective_size);

InjectionReport inject_visual_deception(Document& doc, const PayloadPool& pool,
                                        const LayoutSpec& spec, const InjectOptions& opt);
InjectionReport inject_micropixel(Document& doc, const PayloadPool& pool,
                                  const InjectOptions& opt);
InjectionReport inject_layer_cake(Document& doc, const PayloadPool& pool,
                                  const LayoutSpec& spec, const InjectOptions& opt);

/// The three mechanisms applied in sequence over the same document.
InjectionReport inject_ensemble(Document& doc, const PayloadPool& pool,
                                const LayoutSpec& spec, const InjectOptions& opt);

}  // namespace pdfshield
