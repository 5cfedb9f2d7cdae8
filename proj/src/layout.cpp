#include "pdfshield/layout.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pdfshield/errors.hpp"

namespace pdfshield {

namespace {

struct VenueRow {
    const char* name;
    double w_target;
    int columns;
};

// Target line widths per venue (points); tolerance is 0.05 across the board.
constexpr VenueRow kVenues[] = {
    {"ccs", 220.0, 2},     {"sp", 230.0, 2},      {"usenix", 230.0, 2},
    {"ndss", 240.0, 2},    {"neurips", 370.0, 1}, {"iclr", 370.0, 1},
    {"icml", 230.0, 2},    {"nature", 250.0, 2},  {"natbio", 240.0, 2},
    {"advmater", 235.0, 2}, {"psychrev", 220.0, 2}, {"tits", 245.0, 2},
};

constexpr double kPageWidth = 612.0;   // US letter
constexpr double kGutter = 18.0;

}  // namespace

LayoutSpec venue_preset(const std::string& venue) {
    for (const VenueRow& row : kVenues) {
        if (venue == row.name) {
            LayoutSpec spec;
            spec.venue = row.name;
            spec.w_target = row.w_target;
            spec.epsilon = 0.05;
            spec.y_min = 72.0;
            spec.y_max = 720.0;
            if (row.columns == 2) {
                double total = 2 * row.w_target + kGutter;
                double left = (kPageWidth - total) / 2.0;
                spec.columns = {{left - 1.0, left + row.w_target + 1.0},
                                {left + row.w_target + kGutter - 1.0,
                                 left + 2 * row.w_target + kGutter + 1.0}};
            } else {
                double left = (kPageWidth - row.w_target) / 2.0;
                spec.columns = {{left - 1.0, left + row.w_target + 1.0}};
            }
            spec.vd_anchor = AnchorRegion{54.0, 724.0, kPageWidth - 108.0, 44.0};
            return spec;
        }
    }
    throw MalformedSpec("unknown venue preset: " + venue);
}

std::vector<std::string> venue_names() {
    std::vector<std::string> out;
    for (const VenueRow& row : kVenues)
        out.emplace_back(row.name);
    return out;
}

LayoutSpec parse_layout_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LayoutSpec spec;
    if (j.contains("venue") && !j.contains("w_target")) {
        spec = venue_preset(j["venue"].get<std::string>());
    }
    if (j.contains("venue"))
        spec.venue = j["venue"].get<std::string>();
    if (j.contains("w_target"))
        spec.w_target = j["w_target"].get<double>();
    if (j.contains("epsilon"))
        spec.epsilon = j["epsilon"].get<double>();
    if (j.contains("y_min"))
        spec.y_min = j["y_min"].get<double>();
    if (j.contains("y_max"))
        spec.y_max = j["y_max"].get<double>();
    if (j.contains("columns")) {
        spec.columns.clear();
        for (const auto& c : j["columns"])
            spec.columns.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    }
    if (j.contains("vd_anchor")) {
        const auto& a = j["vd_anchor"];
        spec.vd_anchor = AnchorRegion{a.at("x").get<double>(), a.at("y").get<double>(),
                                      a.at("w").get<double>(), a.at("h").get<double>()};
    }
    if (spec.epsilon <= 0.0 || spec.epsilon >= 1.0)
        throw MalformedSpec("layout epsilon must be in (0,1)");
    return spec;
}

LayoutSpec load_layout_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingFile("cannot open layout file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_layout_json(ss.str());
}

std::string layout_to_json(const LayoutSpec& spec) {
    nlohmann::json j;
    j["venue"] = spec.venue;
    j["w_target"] = spec.w_target;
    j["epsilon"] = spec.epsilon;
    j["y_min"] = spec.y_min;
    j["y_max"] = spec.y_max;
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& [a, b] : spec.columns)
        cols.push_back({a, b});
    j["columns"] = std::move(cols);
    if (spec.vd_anchor) {
        j["vd_anchor"] = {{"x", spec.vd_anchor->x},
                          {"y", spec.vd_anchor->y},
                          {"w", spec.vd_anchor->w},
                          {"h", spec.vd_anchor->h}};
    }
    return j.dump(2);
}

}  // namespace pdfshield
