#include "etm/closing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace etm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool on_model_boundary(const SubdivisionRule& rule, Vec2 p) {
    const auto& poly = rule.model_polygon;
    for (size_t i = 0; i < poly.size(); ++i)
        if (point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]) < 1e-9) return true;
    return false;
}

/// Distance from a point to a tile polygon; seam-boundary critical points
/// count on both face sheets.
double point_tile_distance(const CellDecomposition& d, const ModelPoint& x, int tile) {
    if (d.tile_sheet[tile] != x.sheet) return kInf;
    return point_polygon_distance(x.pos, d.tile_polygon(tile));
}

bool near_critical(const SubdivisionRule& rule, const std::vector<ModelPoint>& crit,
                   const std::vector<Vec2>& poly, int sheet, double eta) {
    for (const ModelPoint& c : crit) {
        bool same = c.sheet == sheet ||
                    (c.sheet < 2 && sheet < 2 && on_model_boundary(rule, c.pos));
        if (same && point_polygon_distance(c.pos, poly) <= eta) return true;
    }
    return false;
}

Word rotate_word(const Word& w, int by) {
    Word out(w.size());
    for (size_t i = 0; i < w.size(); ++i) out[i] = w[(i + by) % w.size()];
    return out;
}

}  // namespace

double gap(const PeriodicOrbit& o) { return o.gap_value; }

double r_theta_gap(const PeriodicOrbit& o, const GapSpec& spec) {
    if (!(spec.r > 0) || !(spec.theta > 0)) fail(ErrorKind::contract, "gap spec must be positive");
    return std::min(spec.r, spec.theta * o.gap_value);
}

std::vector<ModelPoint> critical_points(const std::shared_ptr<const SubdivisionRule>& rule) {
    CellDecomposition d = refine(rule, 1);
    std::vector<ModelPoint> out;
    for (int v = 0; v < d.vertex_count(); ++v)
        if (d.vertex_local_degree(v) >= 2) out.push_back({d.vertex_sheet[v], d.vertex_pos[v]});
    return out;
}

PeriodicOrbit periodic_point_from_cycle(const SubdivisionRule& rule, const Word& cycle) {
    if (cycle.empty()) fail(ErrorKind::contract, "empty cycle");
    const int n = static_cast<int>(cycle.size());
    for (int i = 0; i < n; ++i)
        if (!rule.admissible(cycle[i], cycle[(i + 1) % n]))
            fail(ErrorKind::contract, "cycle word is not cyclically admissible");

    PeriodicOrbit o;
    int p = primitive_period(cycle);
    o.word = Word(cycle.begin(), cycle.begin() + p);
    o.period = p;
    for (int i = 0; i < p; ++i)
        o.points.push_back(address_to_point(rule, EventuallyPeriodicWord{{}, rotate_word(o.word, i)}));

    ModelPoint x = o.points[0];
    for (int i = 0; i < p; ++i) x = map_point(rule, x);
    if (glued_distance(rule, x, o.points[0]) > 1e-8)
        fail(ErrorKind::numeric, "periodic point drifts under iteration");

    o.gap_value = kInf;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            o.gap_value = std::min(o.gap_value, glued_distance(rule, o.points[i], o.points[j]));
    return o;
}

PeriodicOrbit bq_search(const CylinderGraph& g, const CellDecomposition& dec,
                        const std::vector<int>& k_nodes, double kappa, double epsilon) {
    if (k_nodes.empty()) fail(ErrorKind::contract, "empty K");
    if (!(epsilon > 0) || !(kappa > 0)) fail(ErrorKind::contract, "epsilon, kappa must be positive");
    if (dec.level != g.level || dec.tile_count() != g.node_count())
        fail(ErrorKind::contract, "decomposition level does not match the graph");
    const int n = g.node_count();

    const int budget = static_cast<int>(std::floor(std::pow(1.0 / epsilon, kappa)));
    int best_len = -1, best_start = -1;
    std::vector<int> parent(n), depth(n);
    std::vector<char> allowed(n, 0);

    // shortest cycle in the induced subgraph: BFS back to each start node
    auto shortest_cycle = [&]() {
        best_len = -1;
        best_start = -1;
        for (int s = 0; s < n; ++s) {
            if (!allowed[s]) continue;
            std::fill(depth.begin(), depth.end(), -1);
            std::vector<int> queue{s};
            depth[s] = 0;
            int found = -1;
            for (size_t qi = 0; qi < queue.size() && found < 0; ++qi) {
                int v = queue[qi];
                if (best_len > 0 && depth[v] + 1 >= best_len) break;
                for (int t : g.successors(v)) {
                    if (t == s) {
                        found = depth[v] + 1;
                        parent[s] = v;
                        break;
                    }
                    if (!allowed[t] || depth[t] >= 0) continue;
                    depth[t] = depth[v] + 1;
                    parent[t] = v;
                    queue.push_back(t);
                }
            }
            if (found > 0 && (best_len < 0 || found < best_len)) {
                best_len = found;
                best_start = s;
                if (best_len == 1) break;
            }
        }
    };

    // a cycle inside K itself sits at distance 0 from K, so take it whenever
    // one exists within the period budget
    for (int k : k_nodes) allowed[k] = 1;
    shortest_cycle();

    if (best_len < 0 || best_len >= budget) {
        // widen to the epsilon-neighborhood of K
        std::vector<std::vector<Vec2>> k_polys;
        std::vector<int> k_sheets;
        for (int k : k_nodes) {
            k_polys.push_back(dec.tile_polygon(k));
            k_sheets.push_back(dec.tile_sheet[k]);
        }
        for (int v = 0; v < n; ++v) {
            if (allowed[v]) continue;
            auto poly = dec.tile_polygon(v);
            for (size_t j = 0; j < k_polys.size() && !allowed[v]; ++j) {
                if (tiles_touch(dec, v, k_nodes[j])) {
                    allowed[v] = 1;
                } else if (dec.tile_sheet[v] == k_sheets[j]) {
                    allowed[v] = convex_polygon_distance(poly, k_polys[j]) <= epsilon;
                }
            }
        }
        shortest_cycle();
    }
    if (best_len < 0) fail(ErrorKind::not_found, "no cycle inside the epsilon-neighborhood of K");
    if (best_len >= budget)
        fail(ErrorKind::not_found, "shortest cycle found has period " + std::to_string(best_len) +
                                       ", at or beyond the budget (1/eps)^kappa = " +
                                       std::to_string(budget));

    // walk the parent chain back from the start to list the cycle nodes
    std::fill(depth.begin(), depth.end(), -1);
    std::vector<int> queue{best_start};
    depth[best_start] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        for (int t : g.successors(v)) {
            if (t == best_start && depth[v] == best_len - 1) {
                std::vector<int> nodes;
                for (int u = v; nodes.size() < static_cast<size_t>(best_len); u = parent[u])
                    nodes.push_back(u);
                std::reverse(nodes.begin(), nodes.end());
                Word cyc;
                for (int u : nodes) cyc.push_back(g.symbol(u, 0));
                return periodic_point_from_cycle(*g.rule, cyc);
            }
            if (!allowed[t] || depth[t] >= 0 || t == best_start) continue;
            depth[t] = depth[v] + 1;
            parent[t] = v;
            queue.push_back(t);
        }
    }
    fail(ErrorKind::numeric, "cycle reconstruction failed");
}

ShadowReport local_anosov_close(const std::shared_ptr<const SubdivisionRule>& rule, const Word& w,
                                int l, double delta, double eta) {
    const int total = static_cast<int>(w.size());
    if (l < 1 || l >= total)
        fail(ErrorKind::contract, "need 1 <= l < |w| (trailing context required)");
    if (!(delta > 0) || !(eta >= 0)) fail(ErrorKind::contract, "delta > 0, eta >= 0 required");
    const int context = total - l;

    ModelPoint x0 = address_to_point(*rule, w);
    ModelPoint xl = address_to_point(*rule, Word(w.begin() + l, w.end()));
    double defect = glued_distance(*rule, x0, xl);
    if (defect > delta)
        fail(ErrorKind::contract, "pseudo-orbit defect " + std::to_string(defect) +
                                      " exceeds delta = " + std::to_string(delta));

    if (eta > 0) {
        auto crit = critical_points(rule);
        const int check_level = std::min(context, 6);
        CellDecomposition dec = refine(rule, check_level);
        for (int i = 0; i < l; ++i) {
            Word win(w.begin() + i, w.begin() + i + check_level);
            int t = dec.find_tile(win);
            if (near_critical(*rule, crit, dec.tile_polygon(t), dec.tile_sheet[t], eta))
                fail(ErrorKind::contract,
                     "pseudo-orbit step " + std::to_string(i) + " enters the eta-neighborhood "
                     "of a critical point");
        }
    }

    // close the length-l word, keeping the longest possible prefix
    Word cyc(w.begin(), w.begin() + l);
    int repaired = -1;
    const int tiles = rule->tile_count();
    if (rule->admissible(cyc[l - 1], cyc[0])) {
        repaired = 0;
    } else if (l >= 2) {
        for (int s = 0; s < tiles && repaired < 0; ++s)
            if (rule->admissible(cyc[l - 2], s) && rule->admissible(s, cyc[0])) {
                cyc[l - 1] = static_cast<uint8_t>(s);
                repaired = 1;
            }
        if (repaired < 0 && l >= 3) {
            for (int s1 = 0; s1 < tiles && repaired < 0; ++s1) {
                if (!rule->admissible(cyc[l - 3], s1)) continue;
                for (int s2 = 0; s2 < tiles && repaired < 0; ++s2)
                    if (rule->admissible(s1, s2) && rule->admissible(s2, cyc[0])) {
                        cyc[l - 2] = static_cast<uint8_t>(s1);
                        cyc[l - 1] = static_cast<uint8_t>(s2);
                        repaired = 2;
                    }
            }
        }
    }
    if (repaired < 0)
        fail(ErrorKind::not_found, "no admissible closure within the repair depth");

    ShadowReport rep;
    rep.orbit = periodic_point_from_cycle(*rule, cyc);
    rep.repaired = repaired;

    const double lambda = rule->lambda_default;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int fitted = 0;
    for (int i = 0; i < l; ++i) {
        ModelPoint xi = address_to_point(*rule, Word(w.begin() + i, w.end()));
        const ModelPoint& yi = rep.orbit.points[i % rep.orbit.period];
        double d = glued_distance(*rule, xi, yi);
        rep.distances.push_back(d);
        rep.beta_hat = std::max(rep.beta_hat, d / (delta * std::pow(lambda, -(l - i))));
        if (d > 1e-14) {
            double a = static_cast<double>(l - i), b = std::log(d);
            sx += a;
            sy += b;
            sxx += a * a;
            sxy += a * b;
            ++fitted;
        }
    }
    if (fitted >= 2) rep.slope = (fitted * sxy - sx * sy) / (fitted * sxx - sx * sx);
    return rep;
}

GapBoundReport bound_by_gap(const CylinderGraph& g, const CellDecomposition& dec,
                            const std::vector<int>& k_nodes, const GapSpec& spec, double alpha,
                            double tau, double kappa, double eta) {
    if (!(alpha > 0 && alpha <= 1)) fail(ErrorKind::contract, "alpha must lie in (0, 1]");
    if (!(tau > 0)) fail(ErrorKind::contract, "tau must be positive");
    const SubdivisionRule& rule = *g.rule;

    auto dist_to_k = [&](const ModelPoint& x) {
        double best = kInf;
        for (int k : k_nodes) best = std::min(best, point_tile_distance(dec, x, k));
        return best;
    };

    GapBoundReport rep;
    rep.orbit = bq_search(g, dec, k_nodes, kappa, spec.r);
    rep.periods.push_back(rep.orbit.period);
    const int max_steps =
        static_cast<int>(std::log2(std::max(2, rep.orbit.period))) + 2;

    for (;;) {
        rep.lhs = 0;
        for (const ModelPoint& x : rep.orbit.points) rep.lhs += std::pow(dist_to_k(x), alpha);
        rep.rhs = tau * std::pow(r_theta_gap(rep.orbit, spec), alpha);
        if (rep.lhs <= rep.rhs) return rep;
        if (static_cast<int>(rep.periods.size()) > max_steps || rep.orbit.period == 1) {
            std::string trace;
            for (int p : rep.periods) trace += std::to_string(p) + " ";
            fail(ErrorKind::numeric, "gap-bound recursion failed; period trace: " + trace);
        }

        // candidate pairs in increasing distance; closing the segment between a
        // pair can fail (no admissible repair, critical-point grazing), so fall
        // through to the next-closest pair rather than give up
        const int p = rep.orbit.period;
        struct Pair {
            double d;
            int start, nsteps;
        };
        std::vector<Pair> pairs;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                double d = glued_distance(rule, rep.orbit.points[i], rep.orbit.points[j]);
                int start = (j - i) * 2 <= p ? i : j;
                int nsteps = (j - i) * 2 <= p ? j - i : p - (j - i);
                pairs.push_back({d, start, nsteps});
            }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            return a.d != b.d ? a.d < b.d : a.start < b.start;
        });
        bool closed = false;
        for (const Pair& pr : pairs) {
            // trailing context deep enough that the cylinder diameter is far
            // below the pair distance, so the realized defect stays ~d
            int ctx = std::max(p, static_cast<int>(std::ceil(
                                      std::log(20.0 / std::max(pr.d, 1e-12)) /
                                      std::log(rule.lambda_default))));
            Word w = rotate_word(rep.orbit.word, pr.start);
            Word pseudo;
            for (int i = 0; i < pr.nsteps + ctx; ++i) pseudo.push_back(w[i % p]);
            try {
                ShadowReport sr =
                    local_anosov_close(g.rule, pseudo, pr.nsteps, pr.d * 1.5 + 1e-12, eta);
                rep.orbit = sr.orbit;
                closed = true;
                break;
            } catch (const Error&) {
                continue;
            }
        }
        if (!closed)
            fail(ErrorKind::not_found, "no closable pair on the current orbit");
        rep.periods.push_back(rep.orbit.period);
    }
}

ExpansionReport uniform_expansion_check(const std::shared_ptr<const SubdivisionRule>& rule,
                                        int samples, double eta, int n, unsigned seed) {
    if (n < 1 || samples < 1) fail(ErrorKind::contract, "need n, samples >= 1");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    auto crit = critical_points(rule);
    const int guard = 3;
    ExpansionReport rep;
    rep.min_ratio = kInf;
    const double ln = std::pow(rule->lambda_default, n);
    while (rep.samples < samples) {
        // random face word of length n + guard
        Word w;
        std::uniform_int_distribution<int> pick(0, rule->tile_count() - 1);
        w.push_back(static_cast<uint8_t>(pick(rng)));
        while (static_cast<int>(w.size()) < n + guard) {
            std::vector<int> next;
            for (int a = 0; a < rule->tile_count(); ++a)
                if (rule->admissible(w.back(), a)) next.push_back(a);
            w.push_back(static_cast<uint8_t>(next[rng() % next.size()]));
        }
        bool pockets = false;
        for (uint8_t s : w) pockets |= rule->tiles[s].sheet != rule->tiles[s].face;
        if (pockets) continue;

        Affine frame = compose_charts(*rule, w);
        auto sample_point = [&]() {
            for (;;) {
                Vec2 q{unit(rng), unit(rng)};
                if (point_in_convex_polygon(q, rule->model_polygon, -1e-6)) return frame(q);
            }
        };
        ModelPoint x{rule->tiles[w.front()].face, sample_point()};
        ModelPoint y{x.sheet, sample_point()};
        double before = dist(x.pos, y.pos);
        if (before < 1e-13) continue;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (const ModelPoint& c : crit) {
                bool same = c.sheet == x.sheet ||
                            (c.sheet < 2 && x.sheet < 2 && on_model_boundary(*rule, c.pos));
                if (same && (dist(c.pos, x.pos) <= eta || dist(c.pos, y.pos) <= eta)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
            x = map_point(*rule, x);
            y = map_point(*rule, y);
        }
        if (!ok) continue;
        double ratio = dist(x.pos, y.pos) / before;
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        ++rep.samples;
    }
    rep.c2_hat = std::min(rep.min_ratio / ln, ln / rep.max_ratio);
    return rep;
}

}  // namespace etm
