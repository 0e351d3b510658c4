#include "etm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace etm {

namespace {

constexpr double kBoundaryTol = 1e-9;

bool on_face_boundary(const SubdivisionRule& rule, const Vec2& p) {
    const auto& poly = rule.model_polygon;
    for (size_t j = 0; j < poly.size(); ++j)
        if (point_segment_distance(p, poly[j], poly[(j + 1) % poly.size()]) <= kBoundaryTol)
            return true;
    return false;
}

void require_face_plane(const SubdivisionRule& rule, const ModelPoint& x) {
    if (x.sheet != 0 && x.sheet != 1)
        fail(ErrorKind::contract, "operation supports the two face planes only");
    (void)rule;
}

void require_face_symbols(const SubdivisionRule& rule, const Word& w) {
    for (uint8_t s : w)
        if (rule.tiles[s].sheet != rule.tiles[s].face)
            fail(ErrorKind::contract,
                 "tile '" + rule.tiles[s].name + "' lives on a pocket plane; no exact chart chain");
}

}  // namespace

Affine compose_charts(const SubdivisionRule& rule, const Word& w) {
    Affine a = Affine::identity();
    for (uint8_t s : w) a = rule.charts[s].then(a);  // a := a o chart_s
    return a;
}

double glued_distance(const SubdivisionRule& rule, const ModelPoint& x, const ModelPoint& y) {
    if (x.sheet == y.sheet) return dist(x.pos, y.pos);
    if (x.sheet >= 2 || y.sheet >= 2) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const auto& poly = rule.model_polygon;
    const int per_edge = 64;
    for (size_t i = 0; i < poly.size(); ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        for (int j = 0; j <= per_edge; ++j) {
            Vec2 s = a + (b - a) * (static_cast<double>(j) / per_edge);
            best = std::min(best, dist(x.pos, s) + dist(s, y.pos));
        }
    }
    return best;
}

bool tiles_touch(const CellDecomposition& d, int t1, int t2) {
    const int m = d.m();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (d.tile_corner[t1 * m + i] == d.tile_corner[t2 * m + j]) return true;
    return false;
}

double visual_distance(const std::vector<CellDecomposition>& tower, const ModelPoint& x,
                       const ModelPoint& y, const VisualMetricConfig& cfg) {
    if (cfg.lambda <= 1) fail(ErrorKind::contract, "expansion factor must exceed 1");
    int top = std::min(cfg.max_level, static_cast<int>(tower.size()) - 1);
    int m = 0;
    for (int k = 1; k <= top; ++k) {
        auto sx = locate_tiles(tower[k], x);
        auto sy = locate_tiles(tower[k], y);
        if (sx.empty() || sy.empty()) break;
        auto ball = bouquet_of_tiles(tower[k], sx);
        bool inside = false;
        for (int t : sy) inside |= std::binary_search(ball.begin(), ball.end(), t);
        if (!inside) break;
        m = k;
    }
    return std::pow(cfg.lambda, -m);
}

double word_quasi_distance(const std::vector<CellDecomposition>& tower, const Word& a,
                           const Word& b, double lambda) {
    int top = std::min({a.size(), b.size(), tower.size() - 1});
    int m = 0;
    for (int k = 1; k <= top; ++k) {
        int t1 = tower[k].find_tile(Word(a.begin(), a.begin() + k));
        int t2 = tower[k].find_tile(Word(b.begin(), b.begin() + k));
        if (t1 < 0 || t2 < 0) fail(ErrorKind::contract, "inadmissible word");
        if (!tiles_touch(tower[k], t1, t2)) break;
        m = k;
    }
    return std::pow(lambda, -m);
}

double chordal_distance(const SpherePoint& z, const SpherePoint& w) {
    if (z.inf && w.inf) return 0.0;
    if (z.inf) return 2.0 / std::sqrt(1.0 + std::norm(w.z));
    if (w.inf) return 2.0 / std::sqrt(1.0 + std::norm(z.z));
    return 2.0 * std::abs(z.z - w.z) /
           (std::sqrt(1.0 + std::norm(z.z)) * std::sqrt(1.0 + std::norm(w.z)));
}

SpherePoint lattes_eval(const SpherePoint& p) {
    // Homogeneous form: (a : b) -> (4ab(b^2 - a^2) : (a^2 + b^2)^2).
    std::complex<double> a = p.inf ? 1.0 : p.z;
    std::complex<double> b = p.inf ? 0.0 : 1.0;
    double scale = std::max(std::abs(a), std::abs(b));
    a /= scale;
    b /= scale;
    std::complex<double> num = 4.0 * a * b * (b * b - a * a);
    std::complex<double> den = (a * a + b * b) * (a * a + b * b);
    if (std::abs(den) <= 1e-15 * std::max(1.0, std::abs(num))) return SpherePoint::infinity();
    return {num / den, false};
}

EventuallyPeriodicWord canonical_extension(const SubdivisionRule& rule, const Word& w) {
    if (w.empty()) fail(ErrorKind::contract, "cannot extend an empty word");
    for (size_t i = 0; i + 1 < w.size(); ++i)
        if (!rule.admissible(w[i], w[i + 1])) fail(ErrorKind::contract, "inadmissible word");
    if (rule.admissible(w.back(), w.front())) return {{}, w};

    auto greedy = [&](int s) {
        for (int a = 0; a < rule.tile_count(); ++a)
            if (rule.admissible(s, a)) return a;
        fail(ErrorKind::contract, "symbol with no admissible successor");
    };
    // Follow the deterministic greedy walk until it revisits a symbol.
    std::vector<int> first_seen(rule.tile_count(), -1);
    Word tail;
    int s = greedy(w.back());
    while (first_seen[s] < 0) {
        first_seen[s] = static_cast<int>(tail.size());
        tail.push_back(static_cast<uint8_t>(s));
        s = greedy(s);
    }
    EventuallyPeriodicWord out;
    out.prefix = w;
    out.prefix.insert(out.prefix.end(), tail.begin(), tail.begin() + first_seen[s]);
    out.cycle.assign(tail.begin() + first_seen[s], tail.end());
    return out;
}

ModelPoint address_to_point(const SubdivisionRule& rule, const EventuallyPeriodicWord& w) {
    if (w.cycle.empty()) fail(ErrorKind::contract, "periodic part must be nonempty");
    require_face_symbols(rule, w.prefix);
    require_face_symbols(rule, w.cycle);
    if (!w.prefix.empty() && !rule.admissible(w.prefix.back(), w.cycle.front()))
        fail(ErrorKind::contract, "prefix does not chain into the cycle");
    if (!rule.admissible(w.cycle.back(), w.cycle.front()))
        fail(ErrorKind::contract, "cycle is not cyclically admissible");
    Vec2 p = compose_charts(rule, w.cycle).fixed_point();
    ModelPoint out;
    out.pos = compose_charts(rule, w.prefix)(p);
    uint8_t head = w.prefix.empty() ? w.cycle.front() : w.prefix.front();
    out.sheet = rule.tiles[head].face;
    return out;
}

ModelPoint address_to_point(const SubdivisionRule& rule, const Word& w) {
    return address_to_point(rule, canonical_extension(rule, w));
}

Word point_to_address(const SubdivisionRule& rule, const ModelPoint& x, int n) {
    require_face_plane(rule, x);
    if (n < 0) fail(ErrorKind::contract, "negative level");
    int type = x.sheet;
    Vec2 local = x.pos;
    Word w;
    for (int step = 0; step < n; ++step) {
        bool found = false;
        for (const auto& child : rule.patterns[type].children) {
            const TileSpec& spec = rule.tiles[child.tile];
            if (spec.sheet != type) continue;  // pocket tiles are off this plane
            Vec2 q = rule.charts[child.tile].inverse()(local);
            if (!point_in_convex_polygon(q, rule.model_polygon, kBoundaryTol)) continue;
            w.push_back(static_cast<uint8_t>(child.tile));
            local = q;
            type = spec.image_face;
            found = true;
            break;
        }
        if (!found) fail(ErrorKind::numeric, "point escaped the face polygon during descent");
    }
    return w;
}

ModelPoint map_point(const SubdivisionRule& rule, const ModelPoint& x) {
    require_face_plane(rule, x);
    for (const auto& child : rule.patterns[x.sheet].children) {
        const TileSpec& spec = rule.tiles[child.tile];
        if (spec.sheet != x.sheet) continue;
        Vec2 q = rule.charts[child.tile].inverse()(x.pos);
        if (!point_in_convex_polygon(q, rule.model_polygon, kBoundaryTol)) continue;
        return {spec.image_face, q};
    }
    fail(ErrorKind::numeric, "point lies on no face tile");
}

double model_distance(const SubdivisionRule& rule, const ModelPoint& x, const ModelPoint& y) {
    if (x.sheet == y.sheet) return dist(x.pos, y.pos);
    if (x.sheet < 2 && y.sheet < 2 && on_face_boundary(rule, x.pos) &&
        on_face_boundary(rule, y.pos))
        return dist(x.pos, y.pos);  // the face planes share their boundary
    return std::numeric_limits<double>::infinity();
}

namespace {

Word random_word(const SubdivisionRule& rule, int len, std::mt19937& rng) {
    Word w;
    std::uniform_int_distribution<int> pick(0, rule.tile_count() - 1);
    w.push_back(static_cast<uint8_t>(pick(rng)));
    while (static_cast<int>(w.size()) < len) {
        std::vector<int> next;
        for (int a = 0; a < rule.tile_count(); ++a)
            if (rule.admissible(w.back(), a)) next.push_back(a);
        w.push_back(static_cast<uint8_t>(next[rng() % next.size()]));
    }
    return w;
}

void finish_report(SampleReport& r, std::vector<double>& vals) {
    std::sort(vals.begin(), vals.end());
    r.samples = static_cast<int>(vals.size());
    r.min = vals.front();
    r.max = vals.back();
    r.median = vals[vals.size() / 2];
}

}  // namespace

SampleReport factor_commutation_check(const SubdivisionRule& rule, int samples, int n,
                                      unsigned seed) {
    std::mt19937 rng(seed);
    // depth chosen so the cylinder diameter is far below the 1e-9 gate
    int depth = static_cast<int>(std::ceil(45.0 / std::log2(1.0 / rule.max_contraction)));
    SampleReport rep;
    std::vector<double> vals;
    for (int i = 0; i < samples; ++i) {
        Word w = random_word(rule, n + depth, rng);
        if (rule.tiles[w.front()].sheet >= 2) continue;  // pocket-rooted: no chart chain
        bool pockets = false;
        for (uint8_t s : w) pockets |= rule.tiles[s].sheet != rule.tiles[s].face;
        if (pockets) continue;
        ModelPoint x = address_to_point(rule, w);
        Word shifted(w.begin() + 1, w.end());
        double d = model_distance(rule, address_to_point(rule, shifted), map_point(rule, x));
        vals.push_back(d);
        if (d >= rep.max) rep.worst = w;
    }
    if (vals.empty()) fail(ErrorKind::numeric, "no usable samples");
    finish_report(rep, vals);
    return rep;
}

SampleReport metric_distortion_check(const SubdivisionRule& rule, int samples, int k, int n,
                                     unsigned seed) {
    if (k < 1 || n < 1) fail(ErrorKind::contract, "need k, n >= 1");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    const double lambda = rule.lambda_default;
    SampleReport rep;
    std::vector<double> vals;
    while (static_cast<int>(vals.size()) < samples) {
        Word w = random_word(rule, n + k, rng);
        bool pockets = false;
        for (uint8_t s : w) pockets |= rule.tiles[s].sheet != rule.tiles[s].face;
        if (pockets) continue;
        // two interior points of the common (n+k)-tile
        Affine frame = compose_charts(rule, w);
        auto sample_point = [&]() {
            // rejection sample inside the model polygon
            for (;;) {
                Vec2 p{unit(rng), unit(rng)};
                if (point_in_convex_polygon(p, rule.model_polygon, -1e-6)) return frame(p);
            }
        };
        ModelPoint x{rule.tiles[w.front()].face, sample_point()};
        ModelPoint y{x.sheet, sample_point()};
        double before = dist(x.pos, y.pos);
        if (before < 1e-13) continue;
        for (int i = 0; i < n; ++i) {
            x = map_point(rule, x);
            y = map_point(rule, y);
        }
        double after = model_distance(rule, x, y);
        vals.push_back(after / (std::pow(lambda, n) * before));
    }
    finish_report(rep, vals);
    rep.c0 = std::max(rep.max, 1.0 / rep.min);
    return rep;
}

}  // namespace etm
