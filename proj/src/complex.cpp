#include "etm/complex.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace etm {

Word CellDecomposition::tile_address(int t) const {
    auto it = addresses.begin() + static_cast<size_t>(t) * level;
    return Word(it, it + level);
}

int CellDecomposition::find_tile(const Word& w) const {
    if (static_cast<int>(w.size()) != level)
        fail(ErrorKind::contract, "address length does not match level");
    if (level == 0) return tile_count() == 1 ? 0 : -1;
    int lo = 0, hi = tile_count();
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        auto it = addresses.begin() + static_cast<size_t>(mid) * level;
        if (std::lexicographical_compare(it, it + level, w.begin(), w.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo == tile_count()) return -1;
    auto it = addresses.begin() + static_cast<size_t>(lo) * level;
    return std::equal(it, it + level, w.begin()) ? lo : -1;
}

std::vector<Vec2> CellDecomposition::tile_polygon(int t) const {
    std::vector<Vec2> out;
    out.reserve(m());
    for (const Vec2& c : rule->model_polygon) out.push_back(tile_frame[t](c));
    return out;
}

namespace {

CellDecomposition level_zero(const std::shared_ptr<const SubdivisionRule>& rule) {
    CellDecomposition d;
    d.level = 0;
    d.rule = rule;
    const int m = rule->post_count;
    d.sheets = {{rule->sheet_names[0], 0}, {rule->sheet_names[1], 1}};
    for (int f = 0; f < 2; ++f) {
        d.tile_sheet.push_back(f);
        d.tile_frame.push_back(Affine::identity());
        d.tile_type.push_back(f);
        for (int j = 0; j < m; ++j) {
            d.tile_corner.push_back(j);
            d.tile_edge.push_back(j);
        }
    }
    for (int j = 0; j < m; ++j) {
        d.vertex_sheet.push_back(0);
        d.vertex_pos.push_back(rule->model_polygon[j]);
        d.vertex_tiles.push_back({0, 1});
        d.edge_vertex.push_back({j, (j + 1) % m});
        d.edge_tile.push_back({0, 1});
    }
    return d;
}

std::string address_label(const CellDecomposition& d, int tile, TileId extra) {
    std::string s;
    for (int i = 0; i < d.level; ++i) {
        if (!s.empty()) s += '.';
        s += d.rule->tiles[d.addresses[static_cast<size_t>(tile) * d.level + i]].name;
    }
    if (!s.empty()) s += '.';
    return s + d.rule->tiles[extra].name;
}

CellDecomposition refine_once(const CellDecomposition& prev) {
    const SubdivisionRule& r = *prev.rule;
    const int m = r.post_count;

    long next_tiles = 0;
    for (int t = 0; t < prev.tile_count(); ++t)
        next_tiles += static_cast<long>(r.patterns[prev.tile_type[t]].children.size());
    if (next_tiles > r.tile_budget)
        fail(ErrorKind::resource,
             "tile budget exceeded at level " + std::to_string(prev.level + 1));

    CellDecomposition d;
    d.level = prev.level + 1;
    d.rule = prev.rule;
    d.sheets = prev.sheets;

    const int vp = prev.vertex_count(), ep = prev.edge_count();
    // Vertex layout: old vertices, then edge midpoints, then tile interiors.
    d.vertex_sheet = prev.vertex_sheet;
    d.vertex_pos = prev.vertex_pos;
    d.vertex_sheet.resize(vp + ep, -1);
    d.vertex_pos.resize(vp + ep);
    std::vector<int> interior_vx_base(prev.tile_count());
    std::vector<int> interior_ed_base(prev.tile_count());
    int vtot = vp + ep, etot = 2 * ep;
    for (int t = 0; t < prev.tile_count(); ++t) {
        const FacePattern& pat = r.patterns[prev.tile_type[t]];
        interior_vx_base[t] = vtot;
        interior_ed_base[t] = etot;
        vtot += pat.interior_vertex_count;
        etot += pat.interior_edge_count;
    }
    d.vertex_sheet.resize(vtot, -1);
    d.vertex_pos.resize(vtot);
    d.vertex_tiles.resize(vtot);
    d.edge_vertex.resize(etot, {-1, -1});
    d.edge_tile.resize(etot, {-1, -1});
    d.edge_map.resize(etot, -1);
    d.vertex_map.resize(vtot, -1);
    // Children of old edge e: ids 2e (adjacent to endpoint 0) and 2e+1.
    for (int e = 0; e < ep; ++e) {
        d.edge_vertex[2 * e] = {prev.edge_vertex[e][0], vp + e};
        d.edge_vertex[2 * e + 1] = {vp + e, prev.edge_vertex[e][1]};
    }

    d.addresses.reserve(static_cast<size_t>(next_tiles) * d.level);
    d.tile_corner.reserve(next_tiles * m);
    d.tile_edge.reserve(next_tiles * m);

    auto push_edge_tile = [&](int e, int t) {
        if (d.edge_tile[e][0] < 0)
            d.edge_tile[e][0] = t;
        else if (d.edge_tile[e][1] < 0)
            d.edge_tile[e][1] = t;
        else
            fail(ErrorKind::contract, "edge incident to more than two tiles");
    };

    for (int t = 0; t < prev.tile_count(); ++t) {
        const FacePattern& pat = r.patterns[prev.tile_type[t]];
        double parent_scale = prev.tile_frame[t].linear_norm();
        std::map<int, int> pocket_sheet;  // rule sheet -> new sheet id
        for (const FacePattern::Child& c : pat.children) {
            int tn = d.tile_count();
            const TileSpec& spec = r.tiles[c.tile];
            // address = parent address followed by the child symbol
            auto base = prev.addresses.begin() + static_cast<size_t>(t) * prev.level;
            d.addresses.insert(d.addresses.end(), base, base + prev.level);
            d.addresses.push_back(static_cast<uint8_t>(c.tile));
            d.tile_type.push_back(spec.image_face);

            if (spec.sheet == prev.tile_type[t]) {
                d.tile_sheet.push_back(prev.tile_sheet[t]);
                d.tile_frame.push_back(r.charts[c.tile].then(prev.tile_frame[t]));
            } else {
                auto [it, fresh] = pocket_sheet.emplace(spec.sheet, d.sheets.size());
                if (fresh)
                    d.sheets.push_back(
                        {r.sheet_names[spec.sheet] + "@" + address_label(prev, t, c.tile), -1});
                d.tile_sheet.push_back(it->second);
                d.tile_frame.push_back(r.charts[c.tile].then(Affine::scaling(parent_scale)));
            }

            // Image tile under f: shift the address by one symbol.
            int img;
            if (prev.level == 0) {
                img = spec.image_face;  // level-0 tile ids coincide with faces
            } else {
                Word w(base + 1, base + prev.level);
                w.push_back(static_cast<uint8_t>(c.tile));
                img = prev.find_tile(w);
                if (img < 0) fail(ErrorKind::contract, "image address missing at previous level");
            }
            d.tile_map.push_back(img);

            for (int j = 0; j < m; ++j) {
                const auto& vref = c.corners[j];
                int vid;
                switch (vref.kind) {
                    case FacePattern::VertexRef::FaceCorner:
                        vid = prev.tile_corner[t * m + vref.index];
                        break;
                    case FacePattern::VertexRef::EdgeMidpoint:
                        vid = vp + prev.tile_edge[t * m + vref.index];
                        break;
                    default:
                        vid = interior_vx_base[t] + vref.index;
                }
                d.tile_corner.push_back(vid);
                if (d.vertex_sheet[vid] < 0) {
                    d.vertex_sheet[vid] = d.tile_sheet[tn];
                    d.vertex_pos[vid] = d.tile_frame[tn](r.model_polygon[j]);
                }
                d.vertex_tiles[vid].push_back(tn);
                d.vertex_map[vid] = prev.tile_corner[img * m + j];
            }
            for (int j = 0; j < m; ++j) {
                const auto& eref = c.slots[j];
                int eid;
                if (eref.kind == FacePattern::EdgeRef::Interior) {
                    eid = interior_ed_base[t] + eref.index;
                    if (d.edge_vertex[eid][0] < 0)
                        d.edge_vertex[eid] = {d.tile_corner[tn * m + j],
                                              d.tile_corner[tn * m + (j + 1) % m]};
                } else {
                    int e = prev.tile_edge[t * m + eref.index];
                    int corner = (eref.half == 0) ? prev.tile_corner[t * m + eref.index]
                                                  : prev.tile_corner[t * m + (eref.index + 1) % m];
                    if (prev.edge_vertex[e][0] == corner)
                        eid = 2 * e;
                    else if (prev.edge_vertex[e][1] == corner)
                        eid = 2 * e + 1;
                    else
                        fail(ErrorKind::contract, "edge endpoints disagree with tile corners");
                }
                d.tile_edge.push_back(eid);
                push_edge_tile(eid, tn);
                d.edge_map[eid] = prev.tile_edge[img * m + j];
            }
        }
    }

    for (int e = 0; e < etot; ++e)
        if (d.edge_tile[e][1] < 0)
            fail(ErrorKind::contract, "open edge after refinement");
    for (auto& inc : d.vertex_tiles) {
        std::sort(inc.begin(), inc.end());
        inc.erase(std::unique(inc.begin(), inc.end()), inc.end());
    }
    return d;
}

}  // namespace

std::vector<CellDecomposition> refine_tower(const std::shared_ptr<const SubdivisionRule>& rule,
                                            int n) {
    if (n < 0) fail(ErrorKind::contract, "negative level");
    std::vector<CellDecomposition> tower;
    tower.push_back(level_zero(rule));
    for (int i = 0; i < n; ++i) tower.push_back(refine_once(tower.back()));
    return tower;
}

CellDecomposition refine(const std::shared_ptr<const SubdivisionRule>& rule, int n) {
    auto tower = refine_tower(rule, n);
    return std::move(tower.back());
}

std::vector<int> flower(const CellDecomposition& d, int v) {
    if (v < 0 || v >= d.vertex_count()) fail(ErrorKind::not_found, "vertex id out of range");
    return d.vertex_tiles[v];
}

std::vector<int> locate_tiles(const CellDecomposition& d, const ModelPoint& x, double tol) {
    std::vector<int> out;
    for (int t = 0; t < d.tile_count(); ++t) {
        if (d.tile_sheet[t] != x.sheet) continue;
        Vec2 local = d.tile_frame[t].inverse()(x.pos);
        double scale = d.tile_frame[t].linear_norm();
        if (point_in_convex_polygon(local, d.rule->model_polygon, tol / scale)) out.push_back(t);
    }
    return out;
}

std::vector<int> bouquet_of_tiles(const CellDecomposition& d, const std::vector<int>& seeds) {
    std::set<int> out;
    const int m = d.m();
    for (int t : seeds)
        for (int j = 0; j < m; ++j)
            for (int u : d.vertex_tiles[d.tile_corner[t * m + j]]) out.insert(u);
    return std::vector<int>(out.begin(), out.end());
}

std::vector<int> bouquet(const CellDecomposition& d, const ModelPoint& x) {
    auto seeds = locate_tiles(d, x);
    if (seeds.empty()) fail(ErrorKind::not_found, "point lies on no tile of this level");
    return bouquet_of_tiles(d, seeds);
}

std::vector<int> bouquet(const CellDecomposition& d, int tile) {
    return bouquet_of_tiles(d, {tile});
}

}  // namespace etm
