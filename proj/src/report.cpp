#include "etm/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace etm {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

json word_ids(const Word& w) {
    json a = json::array();
    for (uint8_t s : w) a.push_back(static_cast<int>(s));
    return a;
}

}  // namespace

std::string render_svg(const CellDecomposition& d, const RenderOptions& opt) {
    const int sheet_count = static_cast<int>(d.sheets.size());
    const double inf = std::numeric_limits<double>::infinity();

    // per-sheet bounding boxes of the tile polygons
    std::vector<double> lo_x(sheet_count, inf), lo_y(sheet_count, inf);
    std::vector<double> hi_x(sheet_count, -inf), hi_y(sheet_count, -inf);
    for (int t = 0; t < d.tile_count(); ++t) {
        int s = d.tile_sheet[t];
        for (const Vec2& p : d.tile_polygon(t)) {
            lo_x[s] = std::min(lo_x[s], p.x);
            lo_y[s] = std::min(lo_y[s], p.y);
            hi_x[s] = std::max(hi_x[s], p.x);
            hi_y[s] = std::max(hi_y[s], p.y);
        }
    }

    // lay the sheet panels out left to right (y flipped: SVG is y-down)
    std::vector<double> offset(sheet_count, 0.0);
    double cursor = opt.margin, height = 0;
    for (int s = 0; s < sheet_count; ++s) {
        if (lo_x[s] > hi_x[s]) continue;  // sheet holds no tiles at this level
        offset[s] = cursor - lo_x[s] * opt.scale;
        cursor += (hi_x[s] - lo_x[s]) * opt.scale + opt.margin;
        height = std::max(height, (hi_y[s] - lo_y[s]) * opt.scale);
    }
    const double width = cursor, total_height = height + 2 * opt.margin;

    auto path_of = [&](int t) {
        int s = d.tile_sheet[t];
        std::ostringstream os;
        char cmd = 'M';
        for (const Vec2& p : d.tile_polygon(t)) {
            os << cmd << fmt(offset[s] + p.x * opt.scale) << ' '
               << fmt(opt.margin + (hi_y[s] - p.y) * opt.scale) << ' ';
            cmd = 'L';
        }
        os << 'Z';
        return os.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(total_height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(total_height)
        << "\">\n";
    for (int t = 0; t < d.tile_count(); ++t) {
        const char* fill = d.tile_type[t] == 0 ? "#f7f3e8" : "#8a92a8";
        svg << "  <path class=\"tile\" d=\"" << path_of(t) << "\" fill=\"" << fill
            << "\" stroke=\"#30343c\" stroke-width=\"0.6\"/>\n";
    }
    for (const HighlightSet& h : opt.highlights) {
        svg << "  <g class=\"highlight\" data-label=\"" << h.label << "\">\n";
        for (int t : h.tiles)
            svg << "    <path d=\"" << path_of(t) << "\" fill=\"" << h.color
                << "\" fill-opacity=\"0.55\" stroke=\"" << h.color << "\" stroke-width=\"1.2\"/>\n";
        svg << "  </g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string decomposition_json(const CellDecomposition& d) {
    json doc;
    doc["version"] = kSchemaVersion;
    doc["rule"] = d.rule->name;
    doc["level"] = d.level;
    doc["sheets"] = json::array();
    for (const auto& s : d.sheets)
        doc["sheets"].push_back({{"label", s.label}, {"base_face", s.base_face}});

    json tiles = json::array();
    const int m = d.m();
    for (int t = 0; t < d.tile_count(); ++t) {
        json poly = json::array();
        for (const Vec2& p : d.tile_polygon(t)) poly.push_back({p.x, p.y});
        json tile = {{"id", t},
                     {"address", word_ids(d.tile_address(t))},
                     {"sheet", d.tile_sheet[t]},
                     {"type", d.tile_type[t]},
                     {"polygon", poly},
                     {"edges", std::vector<int>(d.tile_edge.begin() + t * m,
                                                d.tile_edge.begin() + (t + 1) * m)},
                     {"corners", std::vector<int>(d.tile_corner.begin() + t * m,
                                                  d.tile_corner.begin() + (t + 1) * m)}};
        if (d.level >= 1) tile["map"] = d.tile_map[t];
        tiles.push_back(std::move(tile));
    }
    doc["tiles"] = std::move(tiles);

    json edges = json::array();
    for (int e = 0; e < d.edge_count(); ++e) {
        json edge = {{"id", e},
                     {"vertices", {d.edge_vertex[e][0], d.edge_vertex[e][1]}},
                     {"tiles", {d.edge_tile[e][0], d.edge_tile[e][1]}}};
        if (d.level >= 1) edge["map"] = d.edge_map[e];
        edges.push_back(std::move(edge));
    }
    doc["edges"] = std::move(edges);

    json vertices = json::array();
    for (int v = 0; v < d.vertex_count(); ++v) {
        json vert = {{"id", v},
                     {"sheet", d.vertex_sheet[v]},
                     {"pos", {d.vertex_pos[v].x, d.vertex_pos[v].y}},
                     {"tiles", d.vertex_tiles[v]}};
        if (d.level >= 1) vert["map"] = d.vertex_map[v];
        vertices.push_back(std::move(vert));
    }
    doc["vertices"] = std::move(vertices);
    return doc.dump(2);
}

std::string transition_json(const SubdivisionRule& rule) {
    TransitionMatrix a = build_transition(rule);
    json doc;
    doc["version"] = kSchemaVersion;
    doc["rule"] = rule.name;
    doc["states"] = a.states;
    json names = json::array(), adj = json::array();
    for (int x = 0; x < a.states; ++x) {
        names.push_back(rule.tiles[x].name);
        json row = json::array();
        for (int y = 0; y < a.states; ++y)
            if (a.at(x, y)) row.push_back(y);
        adj.push_back(std::move(row));
    }
    doc["state_names"] = std::move(names);
    doc["successors"] = std::move(adj);
    return doc.dump(2);
}

std::string cylinder_graph_json(const CylinderGraph& g) {
    json doc;
    doc["version"] = kSchemaVersion;
    doc["rule"] = g.rule->name;
    doc["level"] = g.level;
    doc["nodes"] = g.node_count();
    json words = json::array(), adj = json::array();
    for (int v = 0; v < g.node_count(); ++v) {
        words.push_back(word_ids(g.word(v)));
        adj.push_back(g.successors(v));
    }
    doc["words"] = std::move(words);
    doc["successors"] = std::move(adj);
    return doc.dump(2);
}

std::string tpo_report_json(const SubdivisionRule& rule, const TpoReport& rep,
                            const LockingResult& locking) {
    json doc;
    doc["version"] = kSchemaVersion;
    doc["rule"] = rule.name;
    doc["level"] = rep.level;
    doc["epsilon"] = rep.epsilon;
    doc["alpha"] = rep.alpha;
    doc["orbit"] = {{"word", word_ids(rep.orbit.word)},
                    {"period", rep.orbit.period},
                    {"gap", rep.orbit.gap_value}};
    doc["q_before"] = rep.q_before;
    doc["q_after"] = rep.q_after;
    doc["cycle_before"] = word_ids(rep.cycle_before);
    doc["cycle_after"] = word_ids(rep.cycle_after);
    doc["margin"] = rep.margin;
    doc["success"] = rep.success;
    doc["locking"] = {{"successes", locking.successes}, {"count", locking.count}};
    doc["notes"] = rep.notes;
    return doc.dump(2);
}

std::string sweep_csv(const std::vector<SweepPoint>& sweep) {
    std::ostringstream os;
    os << "t,tv_distance\n";
    os.precision(12);
    for (const SweepPoint& p : sweep) os << p.t << ',' << p.tv << '\n';
    return os.str();
}

}  // namespace etm
