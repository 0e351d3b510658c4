#pragma once

#include <string>
#include <vector>

#include "etm/complex.hpp"
#include "etm/symbolic.hpp"
#include "etm/tpo.hpp"

namespace etm {

/// A named set of tiles drawn on top of the base decomposition.
struct HighlightSet {
    std::string label;
    std::vector<int> tiles;
    std::string color = "#e05252";
};

struct RenderOptions {
    double scale = 256.0;  // pixels per model unit
    double margin = 16.0;  // page border and gap between sheet panels
    std::vector<HighlightSet> highlights;
};

/// SVG document with one closed path per tile (fill = checkerboard color of
/// the tile's image 0-tile), sheets laid out side by side, highlight sets
/// drawn as translucent overlays.
std::string render_svg(const CellDecomposition& d, const RenderOptions& opt = {});

/// Full decomposition export: version, rule, level, sheets, and the tile /
/// edge / vertex arrays with ids, coordinates, incidence, and map action.
std::string decomposition_json(const CellDecomposition& d);

/// Transition matrix and shift graph: adjacency lists by state id, plus the
/// word (id-sequence) of every cylinder node when a graph is given.
std::string transition_json(const SubdivisionRule& rule);
std::string cylinder_graph_json(const CylinderGraph& g);

std::string tpo_report_json(const SubdivisionRule& rule, const TpoReport& rep,
                            const LockingResult& locking);

/// Two-column CSV (t, tv_distance), one row per sweep point.
std::string sweep_csv(const std::vector<SweepPoint>& sweep);

}  // namespace etm
