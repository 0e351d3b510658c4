#include "etm/rule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace etm {

namespace {

constexpr double kCoordTol = 1e-7;

struct Dsu {
    std::vector<int> p;
    explicit Dsu(int n) : p(n) {
        for (int i = 0; i < n; ++i) p[i] = i;
    }
    int find(int a) {
        while (p[a] != a) a = p[a] = p[p[a]];
        return a;
    }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

bool near(const Vec2& a, const Vec2& b) { return dist(a, b) <= kCoordTol; }

std::pair<long long, long long> quant(const Vec2& v) {
    return {llround(v.x * 1e9), llround(v.y * 1e9)};
}

// Assembles the subdivision pattern of one face from the tile corner tables,
// the explicit glues, and same-plane coordinate coincidence.
FacePattern assemble_pattern(const SubdivisionRule& r, int face) {
    const int m = r.post_count;
    std::vector<TileId> kids;
    for (TileId t = 0; t < r.tile_count(); ++t)
        if (r.tiles[t].face == face) kids.push_back(t);
    const int nk = static_cast<int>(kids.size());
    std::vector<int> kid_index(r.tile_count(), -1);
    for (int i = 0; i < nk; ++i) kid_index[kids[i]] = i;

    // Identify corners: coordinate coincidence on a common plane first.
    Dsu dsu(nk * m);
    std::map<std::tuple<int, long long, long long>, int> seen;
    for (int i = 0; i < nk; ++i) {
        const TileSpec& ts = r.tiles[kids[i]];
        for (int j = 0; j < m; ++j) {
            auto [qx, qy] = quant(ts.corners[j]);
            auto key = std::make_tuple(ts.sheet, qx, qy);
            auto [it, fresh] = seen.emplace(key, i * m + j);
            if (!fresh) dsu.unite(i * m + j, it->second);
        }
    }

    FacePattern pat;
    pat.children.resize(nk);
    for (int i = 0; i < nk; ++i) {
        pat.children[i].tile = kids[i];
        pat.children[i].slots.resize(m);
        pat.children[i].corners.resize(m);
    }
    // -2 = unresolved, otherwise: resolved (stored directly in slots).
    std::vector<std::vector<char>> slot_done(nk, std::vector<char>(m, 0));

    // Explicit glues for this face: identify endpoints, produce interior edges.
    for (const GlueSpec& g : r.glues) {
        if (r.tiles[g.tile_a].face != face) continue;
        if (r.tiles[g.tile_b].face != face)
            fail(ErrorKind::validation, "glue joins tiles of different faces");
        if (g.slot_a != g.slot_b)
            fail(ErrorKind::validation, "glued edges must carry equal slot labels");
        int a = kid_index[g.tile_a], b = kid_index[g.tile_b];
        int j = g.slot_a, j1 = (j + 1) % m;
        dsu.unite(a * m + j, b * m + j);
        dsu.unite(a * m + j1, b * m + j1);
        if (slot_done[a][j] || slot_done[b][j])
            fail(ErrorKind::validation, "tile edge glued twice in rule '" + r.name + "'");
        FacePattern::EdgeRef e{FacePattern::EdgeRef::Interior, pat.interior_edge_count++, 0};
        pat.children[a].slots[j] = e;
        pat.children[b].slots[j] = e;
        slot_done[a][j] = slot_done[b][j] = 1;
    }

    // Remaining slots: pair by endpoint classes.
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_ends;
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j < m; ++j) {
            if (slot_done[i][j]) continue;
            int u = dsu.find(i * m + j), v = dsu.find(i * m + (j + 1) % m);
            by_ends[{std::min(u, v), std::max(u, v)}].push_back({i, j});
        }
    std::vector<std::vector<char>> half_used(m, std::vector<char>(2, 0));
    for (auto& [ends, slots] : by_ends) {
        if (slots.size() == 2) {
            auto [a, ja] = slots[0];
            auto [b, jb] = slots[1];
            if (ja != jb)
                fail(ErrorKind::validation, "matched edges carry unequal slot labels");
            FacePattern::EdgeRef e{FacePattern::EdgeRef::Interior, pat.interior_edge_count++, 0};
            pat.children[a].slots[ja] = e;
            pat.children[b].slots[jb] = e;
            continue;
        }
        if (slots.size() != 1)
            fail(ErrorKind::validation, "more than two tiles share an edge in rule '" + r.name + "'");
        // Unmatched: must be half of a 0-edge of the face polygon.
        auto [i, j] = slots[0];
        const TileSpec& ts = r.tiles[kids[i]];
        if (ts.sheet != face)
            fail(ErrorKind::validation,
                 "unmatched edge of tile '" + ts.name + "' lies off the face plane");
        Vec2 p = ts.corners[j], q = ts.corners[(j + 1) % m];
        bool hit = false;
        for (int k = 0; k < m && !hit; ++k) {
            Vec2 c0 = r.model_polygon[k], c1 = r.model_polygon[(k + 1) % m];
            Vec2 mid{(c0.x + c1.x) / 2, (c0.y + c1.y) / 2};
            for (int h = 0; h < 2 && !hit; ++h) {
                Vec2 e0 = (h == 0) ? c0 : mid, e1 = (h == 0) ? mid : c1;
                if ((near(p, e0) && near(q, e1)) || (near(p, e1) && near(q, e0))) {
                    if (half_used[k][h])
                        fail(ErrorKind::validation, "boundary half covered twice");
                    half_used[k][h] = 1;
                    pat.children[i].slots[j] = {FacePattern::EdgeRef::BoundaryHalf, k, h};
                    hit = true;
                }
            }
        }
        if (!hit)
            fail(ErrorKind::validation,
                 "dangling edge of tile '" + ts.name + "' is not a boundary half");
    }
    for (int k = 0; k < m; ++k)
        for (int h = 0; h < 2; ++h)
            if (!half_used[k][h])
                fail(ErrorKind::validation, "face boundary not fully covered by tiles");

    // Classify corner classes: face corners, edge midpoints, interior.
    std::map<int, FacePattern::VertexRef> cls;
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j < m; ++j) {
            int root = dsu.find(i * m + j);
            auto it = cls.find(root);
            if (it != cls.end()) {
                pat.children[i].corners[j] = it->second;
                continue;
            }
            FacePattern::VertexRef ref{FacePattern::VertexRef::Interior, -1};
            // Classification needs a representative on the face plane.
            for (int i2 = 0; i2 < nk && ref.index < 0; ++i2) {
                const TileSpec& t2 = r.tiles[kids[i2]];
                if (t2.sheet != face) continue;
                for (int j2 = 0; j2 < m; ++j2) {
                    if (dsu.find(i2 * m + j2) != root) continue;
                    for (int k = 0; k < m; ++k) {
                        Vec2 c0 = r.model_polygon[k], c1 = r.model_polygon[(k + 1) % m];
                        Vec2 mid{(c0.x + c1.x) / 2, (c0.y + c1.y) / 2};
                        if (near(t2.corners[j2], c0)) ref = {FacePattern::VertexRef::FaceCorner, k};
                        if (near(t2.corners[j2], mid)) ref = {FacePattern::VertexRef::EdgeMidpoint, k};
                    }
                    break;
                }
            }
            if (ref.index < 0) ref = {FacePattern::VertexRef::Interior, pat.interior_vertex_count++};
            cls[root] = ref;
            pat.children[i].corners[j] = ref;
        }
    return pat;
}

void check_level_one(const SubdivisionRule& r) {
    const int m = r.post_count;
    int interior_e = 0, interior_v = 0;
    for (const FacePattern& p : r.patterns) {
        interior_e += p.interior_edge_count;
        interior_v += p.interior_vertex_count;
    }
    int E = interior_e + 2 * m;           // shared boundary halves counted once
    int V = 2 * m + interior_v;           // 0-vertices + midpoints + interior
    int F = r.tile_count();
    if (E != m * r.degree)
        fail(ErrorKind::validation, "edge count at level 1 is not m * degree");
    if (V - E + F != 2)
        fail(ErrorKind::validation, "level-1 complex is not a sphere (Euler characteristic)");

    // Checkerboard: edge-adjacent 1-tiles map to distinct 0-tiles.
    std::map<std::pair<int, int>, std::vector<int>> edges;  // key -> image faces
    for (int f = 0; f < 2; ++f) {
        const FacePattern& p = r.patterns[f];
        std::vector<std::vector<int>> interior(p.interior_edge_count);
        for (const auto& c : p.children)
            for (int j = 0; j < m; ++j) {
                const auto& s = c.slots[j];
                if (s.kind == FacePattern::EdgeRef::Interior)
                    interior[s.index].push_back(r.tiles[c.tile].image_face);
                else
                    edges[{s.index, s.half}].push_back(r.tiles[c.tile].image_face);
            }
        for (const auto& pair : interior)
            if (pair.size() != 2 || pair[0] == pair[1])
                fail(ErrorKind::validation, "adjacent tiles map to the same face");
    }
    for (const auto& [key, pair] : edges)
        if (pair.size() != 2 || pair[0] == pair[1])
            fail(ErrorKind::validation, "adjacent tiles map to the same face");
}

TileSpec tile(std::string name, int face, int image, int sheet, std::vector<Vec2> cs) {
    return TileSpec{std::move(name), face, image, sheet, std::move(cs)};
}

SubdivisionRule make_pillow() {
    SubdivisionRule r;
    r.name = "pillow_lattes";
    r.degree = 4;
    r.post_count = 4;
    r.vertex_labels = {"A", "B", "C", "D"};
    r.model_polygon = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    r.sheet_names = {"front", "back"};
    r.lambda_default = 2.0;
    // Quadrants of each unit square; corner order realizes the degree-4
    // Lattes map (A, B, C, D are the four post-critical points).
    r.tiles = {
        tile("FA", 0, 0, 0, {{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}),
        tile("FB", 0, 1, 0, {{1, 0}, {0.5, 0}, {0.5, 0.5}, {1, 0.5}}),
        tile("FC", 0, 0, 0, {{1, 1}, {0.5, 1}, {0.5, 0.5}, {1, 0.5}}),
        tile("FD", 0, 1, 0, {{0, 1}, {0.5, 1}, {0.5, 0.5}, {0, 0.5}}),
        tile("BA", 1, 1, 1, {{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}),
        tile("BB", 1, 0, 1, {{1, 0}, {0.5, 0}, {0.5, 0.5}, {1, 0.5}}),
        tile("BC", 1, 1, 1, {{1, 1}, {0.5, 1}, {0.5, 0.5}, {1, 0.5}}),
        tile("BD", 1, 0, 1, {{0, 1}, {0.5, 1}, {0.5, 0.5}, {0, 0.5}}),
    };
    return r;
}

SubdivisionRule make_barycentric() {
    SubdivisionRule r;
    r.name = "barycentric";
    r.degree = 6;
    r.post_count = 3;
    r.vertex_labels = {"V", "E", "F"};  // corner, edge midpoint, barycenter
    const double s = std::sqrt(3.0);
    Vec2 A{0, 0}, B{1, 0}, C{0.5, s / 2};
    Vec2 mab{0.5, 0}, mbc{0.75, s / 4}, mca{0.25, s / 4}, g{0.5, s / 6};
    r.model_polygon = {A, B, C};
    r.sheet_names = {"front", "back"};
    r.lambda_default = 2.0;
    // Barycentric subdivision of both triangles; each small triangle is
    // (corner, edge midpoint, barycenter) and orientation picks the image.
    struct K {
        const char* n;
        Vec2 c, mid;
    };
    K ks[6] = {{"0", A, mab}, {"1", B, mab}, {"2", B, mbc},
               {"3", C, mbc}, {"4", C, mca}, {"5", A, mca}};
    for (int f = 0; f < 2; ++f)
        for (const K& k : ks) {
            double orient = cross(k.mid - k.c, g - k.c);
            int image = (orient > 0) == (f == 0) ? 0 : 1;
            r.tiles.push_back(tile(std::string(f == 0 ? "F" : "B") + k.n, f, image, f,
                                   {k.c, k.mid, g}));
        }
    return r;
}

SubdivisionRule make_flap() {
    SubdivisionRule r = make_pillow();
    r.name = "flap";
    r.degree = 5;
    r.sheet_names = {"front", "back", "pocketF", "pocketB"};
    // Slit the front square along the segment from the center to the left
    // edge midpoint and sew in a two-faced pocket there.
    std::vector<Vec2> pocket = {{0, 0.5}, {0.5, 0.5}, {0.5, 0}, {0, 0}};
    std::vector<TileSpec> tiles = {r.tiles[0], r.tiles[1], r.tiles[2], r.tiles[3],
                                   tile("PF", 0, 1, 2, pocket),
                                   tile("PB", 0, 0, 3, pocket),
                                   r.tiles[4], r.tiles[5], r.tiles[6], r.tiles[7]};
    r.tiles = std::move(tiles);
    r.glues = {
        {0, 2, 4, 2},  // FA edge CD onto the pocket front
        {3, 2, 5, 2},  // FD edge CD onto the pocket back
        {4, 0, 5, 0},  // remaining pocket rim
        {4, 1, 5, 1},
        {4, 3, 5, 3},
    };
    return r;
}

}  // namespace

int SubdivisionRule::find_tile(const std::string& tile_name) const {
    for (int i = 0; i < tile_count(); ++i)
        if (tiles[i].name == tile_name) return i;
    fail(ErrorKind::not_found, "no tile named '" + tile_name + "' in rule '" + name + "'");
}

std::vector<std::string> builtin_rule_names() { return {"pillow_lattes", "barycentric", "flap"}; }

SubdivisionRule load_builtin(const std::string& name) {
    SubdivisionRule r;
    if (name == "pillow_lattes")
        r = make_pillow();
    else if (name == "barycentric")
        r = make_barycentric();
    else if (name == "flap")
        r = make_flap();
    else
        fail(ErrorKind::not_found, "unknown builtin rule '" + name + "'");
    validate_rule(r);
    return r;
}

void validate_rule(SubdivisionRule& r) {
    if (r.degree < 2) fail(ErrorKind::validation, "degree must be at least 2");
    if (r.post_count < 3) fail(ErrorKind::validation, "need at least 3 marked points");
    const int m = r.post_count;
    if (static_cast<int>(r.vertex_labels.size()) != m)
        fail(ErrorKind::validation, "need one label per marked point");
    if (static_cast<int>(r.model_polygon.size()) != m)
        fail(ErrorKind::validation, "model polygon must have m corners");
    if (r.sheet_names.size() < 2) fail(ErrorKind::validation, "need front and back planes");
    if (r.tile_count() != 2 * r.degree)
        fail(ErrorKind::validation, "a two-tile rule of degree d has 2d tiles");

    // Face-0 tiles first, so children of a tile form a contiguous id range
    // and refinement emits addresses in lexicographic order.
    std::vector<int> order(r.tiles.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return r.tiles[a].face < r.tiles[b].face; });
    std::vector<int> inv(order.size());
    for (size_t i = 0; i < order.size(); ++i) inv[order[i]] = static_cast<int>(i);
    std::vector<TileSpec> sorted;
    sorted.reserve(r.tiles.size());
    for (int i : order) sorted.push_back(std::move(r.tiles[i]));
    r.tiles = std::move(sorted);
    for (GlueSpec& g : r.glues) {
        g.tile_a = inv[g.tile_a];
        g.tile_b = inv[g.tile_b];
    }

    int image_count[2] = {0, 0};
    for (const TileSpec& t : r.tiles) {
        if (t.face != 0 && t.face != 1) fail(ErrorKind::validation, "tile face out of range");
        if (t.image_face != 0 && t.image_face != 1)
            fail(ErrorKind::validation, "tile image face out of range");
        if (t.sheet < 0 || t.sheet >= static_cast<int>(r.sheet_names.size()))
            fail(ErrorKind::validation, "tile sheet out of range");
        if (static_cast<int>(t.corners.size()) != m)
            fail(ErrorKind::validation, "every tile must be an m-gon");
        image_count[t.image_face]++;
    }
    // f is a degree-d branched cover: each face has exactly d preimage tiles.
    if (image_count[0] != r.degree || image_count[1] != r.degree)
        fail(ErrorKind::validation, "each face must have degree-many preimage tiles");

    r.charts.clear();
    r.max_contraction = 0.0;
    for (const TileSpec& t : r.tiles) {
        Affine chart = affine_from_triples(r.model_polygon[0], r.model_polygon[1],
                                           r.model_polygon[2], t.corners[0], t.corners[1],
                                           t.corners[2]);
        for (int j = 3; j < m; ++j)
            if (dist(chart(r.model_polygon[j]), t.corners[j]) > 1e-9)
                fail(ErrorKind::validation, "tile '" + t.name + "' is not affine to the model");
        double c = chart.linear_norm();
        if (c >= 1.0 - 1e-9)
            fail(ErrorKind::validation, "chart of tile '" + t.name + "' is not a contraction");
        r.max_contraction = std::max(r.max_contraction, c);
        r.charts.push_back(chart);
    }

    r.patterns.clear();
    r.patterns.push_back(assemble_pattern(r, 0));
    r.patterns.push_back(assemble_pattern(r, 1));
    check_level_one(r);
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

Vec2 parse_vec(const std::string& tok, const std::string& path) {
    Vec2 v;
    if (std::sscanf(tok.c_str(), "%lf,%lf", &v.x, &v.y) != 2)
        fail(ErrorKind::validation, path + ": bad coordinate pair '" + tok + "'");
    return v;
}

}  // namespace

SubdivisionRule load_rule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::not_found, "cannot open rule file '" + path + "'");
    SubdivisionRule r;
    r.sheet_names = {"front", "back"};
    std::vector<std::pair<std::string, std::array<std::string, 2>>> raw_glues;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        auto where = path + ":" + std::to_string(lineno);
        const std::string& key = toks[0];
        auto need = [&](size_t n) {
            if (toks.size() < n) fail(ErrorKind::validation, where + ": too few fields");
        };
        if (key == "name") {
            need(2);
            r.name = toks[1];
        } else if (key == "degree") {
            need(2);
            r.degree = std::stoi(toks[1]);
        } else if (key == "lambda") {
            need(2);
            r.lambda_default = std::stod(toks[1]);
        } else if (key == "labels") {
            r.vertex_labels.assign(toks.begin() + 1, toks.end());
            r.post_count = static_cast<int>(r.vertex_labels.size());
        } else if (key == "polygon") {
            for (size_t i = 1; i < toks.size(); ++i)
                r.model_polygon.push_back(parse_vec(toks[i], where));
        } else if (key == "sheets") {
            r.sheet_names.assign(toks.begin() + 1, toks.end());
        } else if (key == "tile") {
            // tile NAME FACE IMAGE SHEET x,y x,y ...
            need(5u + r.model_polygon.size());
            TileSpec t;
            t.name = toks[1];
            auto face_of = [&](const std::string& s) {
                if (s == r.sheet_names[0]) return 0;
                if (s == r.sheet_names[1]) return 1;
                fail(ErrorKind::validation, where + ": unknown face '" + s + "'");
            };
            t.face = face_of(toks[2]);
            t.image_face = face_of(toks[3]);
            auto sh = std::find(r.sheet_names.begin(), r.sheet_names.end(), toks[4]);
            if (sh == r.sheet_names.end())
                fail(ErrorKind::validation, where + ": unknown sheet '" + toks[4] + "'");
            t.sheet = static_cast<int>(sh - r.sheet_names.begin());
            for (size_t i = 5; i < toks.size(); ++i)
                t.corners.push_back(parse_vec(toks[i], where));
            r.tiles.push_back(std::move(t));
        } else if (key == "glue") {
            // glue NAME:slot NAME:slot
            need(3);
            raw_glues.push_back({where, {toks[1], toks[2]}});
        } else {
            fail(ErrorKind::validation, where + ": unknown directive '" + key + "'");
        }
    }
    for (auto& [where, sides] : raw_glues) {
        GlueSpec g;
        int* tptr[2] = {&g.tile_a, &g.tile_b};
        int* sptr[2] = {&g.slot_a, &g.slot_b};
        for (int k = 0; k < 2; ++k) {
            auto colon = sides[k].rfind(':');
            if (colon == std::string::npos)
                fail(ErrorKind::validation, where + ": glue side needs NAME:slot");
            *tptr[k] = r.find_tile(sides[k].substr(0, colon));
            *sptr[k] = std::stoi(sides[k].substr(colon + 1));
        }
        r.glues.push_back(g);
    }
    if (r.name.empty()) r.name = path;
    validate_rule(r);
    return r;
}

}  // namespace etm
