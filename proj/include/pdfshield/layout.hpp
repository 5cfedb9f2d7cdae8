#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pdfshield {

struct AnchorRegion {
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
    bool contains(double px, double py) const {
        return px >= x && px <= x + w && py >= y && py <= y + h;
    }
};

/// Page geometry the injectors need: the target line width with its
/// tolerance, column x-ranges, vertical bounds, and (for the layout-element
/// mechanism) the region holding the designated header or footer.
struct LayoutSpec {
    std::string venue;
    double w_target = 0.0;
    double epsilon = 0.05;
    std::vector<std::pair<double, double>> columns;
    double y_min = 0.0;
    double y_max = 0.0;
    std::optional<AnchorRegion> vd_anchor;
};

/// Presets for the twelve venues the toolkit ships with. Target widths and
/// the 0.05 tolerance are fixed per venue; column geometry assumes letter
/// pages with centered columns.
LayoutSpec venue_preset(const std::string& venue);
std::vector<std::string> venue_names();

LayoutSpec load_layout_json(const std::string& path);
LayoutSpec parse_layout_json(const std::string& text);
std::string layout_to_json(const LayoutSpec& spec);

}  // namespace pdfshield
