#include "etm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "etm/symbolic.hpp"

namespace etm {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::contract, "alpha must lie in (0, 1]");
}

bool word_on_faces(const SubdivisionRule& rule, const Word& w) {
    for (uint8_t s : w)
        if (rule.tiles[s].sheet != rule.tiles[s].face) return false;
    return true;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
    Vec2 c{0, 0};
    for (const Vec2& p : poly) c = c + p;
    return c * (1.0 / static_cast<double>(poly.size()));
}

Word random_face_word(const SubdivisionRule& rule, int len, std::mt19937& rng) {
    for (;;) {
        Word w;
        std::uniform_int_distribution<int> pick(0, rule.tile_count() - 1);
        w.push_back(static_cast<uint8_t>(pick(rng)));
        while (static_cast<int>(w.size()) < len) {
            std::vector<int> next;
            for (int a = 0; a < rule.tile_count(); ++a)
                if (rule.admissible(w.back(), a)) next.push_back(a);
            w.push_back(static_cast<uint8_t>(next[rng() % next.size()]));
        }
        if (word_on_faces(rule, w)) return w;
    }
}

void require_table(const Potential& p, const char* who) {
    if (p.kind != Potential::Kind::table)
        fail(ErrorKind::contract, std::string(who) + " needs a table potential");
}

std::string serialize_word(const SubdivisionRule& rule, const Word& w) {
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += '.';
        s += rule.tiles[w[i]].name;
    }
    return s;
}

Word parse_word(const SubdivisionRule& rule, const std::string& s) {
    Word w;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t dot = s.find('.', pos);
        std::string part = s.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        int id = rule.find_tile(part);
        if (id < 0) fail(ErrorKind::validation, "unknown tile name in table key: " + part);
        w.push_back(static_cast<uint8_t>(id));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return w;
}

}  // namespace

Potential closed_form_potential(std::function<double(const ModelPoint&)> fn, double alpha) {
    check_alpha(alpha);
    if (!fn) fail(ErrorKind::contract, "null closed form");
    Potential p;
    p.kind = Potential::Kind::closed_form;
    p.alpha = alpha;
    p.fn = std::move(fn);
    return p;
}

Potential table_potential(std::vector<double> values, int level, double alpha) {
    check_alpha(alpha);
    if (level < 1) fail(ErrorKind::contract, "table level must be >= 1");
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorKind::validation, "table values must be finite");
    Potential p;
    p.kind = Potential::Kind::table;
    p.alpha = alpha;
    p.level = level;
    p.values = std::move(values);
    return p;
}

Potential constant_potential(double c) {
    return closed_form_potential([c](const ModelPoint&) { return c; });
}

Potential coordinate_potential(int axis) {
    if (axis != 0 && axis != 1) fail(ErrorKind::contract, "axis must be 0 or 1");
    return closed_form_potential(
        [axis](const ModelPoint& x) { return axis == 0 ? x.pos.x : x.pos.y; });
}

Potential random_smooth_potential(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2 * M_PI);
    struct Term {
        int j, k;
        double a, t;
    };
    std::vector<Term> terms;
    for (int j = 0; j <= 2; ++j)
        for (int k = 0; k <= 2; ++k) {
            double decay = 1.0 / (1.0 + j + k);
            terms.push_back({j, k, amp(rng) * decay, phase(rng)});
        }
    return closed_form_potential([terms](const ModelPoint& x) {
        double s = 0;
        for (const auto& t : terms)
            s += t.a * std::cos(2 * M_PI * (t.j * x.pos.x + t.k * x.pos.y) + t.t);
        return s;
    });
}

std::vector<ModelPoint> cylinder_representatives(
    const std::shared_ptr<const SubdivisionRule>& rule, int n) {
    if (n < 1) fail(ErrorKind::contract, "need n >= 1");
    std::vector<Word> words = enumerate_words(*rule, n);
    std::vector<ModelPoint> reps(words.size());
    CellDecomposition dec;
    bool have_dec = false;
    Vec2 centroid = polygon_centroid(rule->model_polygon);
    for (size_t i = 0; i < words.size(); ++i) {
        EventuallyPeriodicWord ext = canonical_extension(*rule, words[i]);
        if (word_on_faces(*rule, ext.prefix) && word_on_faces(*rule, ext.cycle)) {
            reps[i] = address_to_point(*rule, ext);
        } else {
            if (!have_dec) {
                dec = refine(rule, n);
                have_dec = true;
            }
            reps[i] = {dec.tile_sheet[static_cast<int>(i)],
                       dec.tile_frame[static_cast<int>(i)](centroid)};
        }
    }
    return reps;
}

Potential discretize(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& p,
                     int n) {
    if (n < 1) fail(ErrorKind::contract, "need n >= 1");
    if (p.kind == Potential::Kind::table) {
        if (p.level == n) return p;
        fail(ErrorKind::contract, "cannot re-discretize a table at a different level");
    }
    std::vector<ModelPoint> reps = cylinder_representatives(rule, n);
    std::vector<double> vals(reps.size());
    for (size_t i = 0; i < reps.size(); ++i) vals[i] = p.fn(reps[i]);
    return table_potential(std::move(vals), n, p.alpha);
}

double birkhoff_sum(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& p,
                    const Word& w, int n_terms) {
    if (n_terms < 0) fail(ErrorKind::contract, "negative term count");
    if (n_terms == 0) return 0.0;
    if (w.empty()) fail(ErrorKind::contract, "empty word");
    if (p.kind == Potential::Kind::table) {
        if (static_cast<int>(w.size()) < p.level + n_terms - 1)
            fail(ErrorKind::contract, "word too short for the requested Birkhoff sum");
        CylinderGraph g = cylinder_graph(rule, p.level);
        double s = 0;
        for (int j = 0; j < n_terms; ++j) {
            Word win(w.begin() + j, w.begin() + j + p.level);
            int idx = g.index_of(win);
            if (idx < 0) fail(ErrorKind::contract, "inadmissible window in word");
            s += p.values[idx];
        }
        return s;
    }
    ModelPoint x = address_to_point(*rule, w);
    double s = 0;
    for (int j = 0; j < n_terms; ++j) {
        s += p.fn(x);
        x = map_point(*rule, x);
    }
    return s;
}

double birkhoff_cycle_sum(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& p,
                          const Word& cycle) {
    const int per = static_cast<int>(cycle.size());
    if (per == 0) fail(ErrorKind::contract, "empty cycle");
    for (int i = 0; i < per; ++i)
        if (!rule->admissible(cycle[i], cycle[(i + 1) % per]))
            fail(ErrorKind::contract, "word is not cyclically admissible");
    if (p.kind == Potential::Kind::table) {
        CylinderGraph g = cylinder_graph(rule, p.level);
        double s = 0;
        for (int j = 0; j < per; ++j) {
            Word win(p.level);
            for (int t = 0; t < p.level; ++t) win[t] = cycle[(j + t) % per];
            int idx = g.index_of(win);
            if (idx < 0) fail(ErrorKind::contract, "inadmissible window in cycle");
            s += p.values[idx];
        }
        return s;
    }
    EventuallyPeriodicWord ext{{}, cycle};
    ModelPoint x = address_to_point(*rule, ext);
    double s = 0;
    for (int j = 0; j < per; ++j) {
        s += p.fn(x);
        x = map_point(*rule, x);
    }
    return s;
}

HolderEstimate holder_seminorm_estimate(const std::shared_ptr<const SubdivisionRule>& rule,
                                        const Potential& p, double alpha, MetricKind metric) {
    check_alpha(alpha);
    require_table(p, "holder_seminorm_estimate");
    CellDecomposition dec = refine(rule, p.level);
    HolderEstimate est;
    est.alpha = alpha;
    est.metric = metric == MetricKind::visual ? "visual" : "model";
    if (metric == MetricKind::visual) {
        // touching distinct n-cylinders sit at quasi-distance Lambda^{-n}
        double scale = std::pow(rule->lambda_default, alpha * p.level);
        double m = 0;
        for (int v = 0; v < dec.vertex_count(); ++v)
            for (size_t a = 0; a < dec.vertex_tiles[v].size(); ++a)
                for (size_t b = a + 1; b < dec.vertex_tiles[v].size(); ++b)
                    m = std::max(m, std::abs(p.values[dec.vertex_tiles[v][a]] -
                                             p.values[dec.vertex_tiles[v][b]]));
        est.seminorm_est = m * scale;
        return est;
    }
    std::vector<ModelPoint> reps = cylinder_representatives(rule, p.level);
    double m = 0;
    for (int v = 0; v < dec.vertex_count(); ++v)
        for (size_t a = 0; a < dec.vertex_tiles[v].size(); ++a)
            for (size_t b = a + 1; b < dec.vertex_tiles[v].size(); ++b) {
                int ta = dec.vertex_tiles[v][a], tb = dec.vertex_tiles[v][b];
                double d = glued_distance(*rule, reps[ta], reps[tb]);
                if (!std::isfinite(d) || d < 1e-12) continue;
                m = std::max(m, std::abs(p.values[ta] - p.values[tb]) / std::pow(d, alpha));
            }
    est.seminorm_est = m;
    return est;
}

VariationReport variation_bound_check(const std::shared_ptr<const SubdivisionRule>& rule,
                                      const Potential& p, int n, int m, int samples,
                                      unsigned seed) {
    if (p.kind != Potential::Kind::closed_form)
        fail(ErrorKind::contract, "variation_bound_check needs a closed form");
    if (n < 1 || m < n) fail(ErrorKind::contract, "need 1 <= n <= m");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::vector<double> ratios;
    while (static_cast<int>(ratios.size()) < samples) {
        Word w = random_face_word(*rule, m, rng);
        Affine frame = compose_charts(*rule, w);
        auto sample_point = [&]() {
            for (;;) {
                Vec2 q{unit(rng), unit(rng)};
                if (point_in_convex_polygon(q, rule->model_polygon, -1e-6)) return frame(q);
            }
        };
        ModelPoint x{rule->tiles[w.front()].face, sample_point()};
        ModelPoint y{x.sheet, sample_point()};
        double sx = 0, sy = 0;
        for (int j = 0; j < n; ++j) {
            sx += p.fn(x);
            sy += p.fn(y);
            x = map_point(*rule, x);
            y = map_point(*rule, y);
        }
        double d = dist(x.pos, y.pos);  // common (m-n)-tile: same sheet
        if (d < 1e-13) continue;
        ratios.push_back(std::abs(sx - sy) / std::pow(d, p.alpha));
    }
    std::sort(ratios.begin(), ratios.end());
    VariationReport rep;
    rep.samples = samples;
    rep.min = ratios.front();
    rep.median = ratios[ratios.size() / 2];
    rep.max = ratios.back();
    rep.c_hat = rep.max;
    return rep;
}

Potential distance_potential(const std::shared_ptr<const SubdivisionRule>& rule,
                             std::vector<ModelPoint> orbit, double alpha) {
    check_alpha(alpha);
    if (orbit.empty()) fail(ErrorKind::contract, "empty orbit");
    return closed_form_potential(
        [rule, orbit = std::move(orbit), alpha](const ModelPoint& x) {
            double best = std::numeric_limits<double>::infinity();
            for (const ModelPoint& o : orbit)
                best = std::min(best, glued_distance(*rule, x, o));
            return std::pow(best, alpha);
        },
        alpha);
}

Potential distance_potential_table(const std::vector<CellDecomposition>& tower,
                                   const std::vector<Word>& windows, double alpha) {
    check_alpha(alpha);
    if (tower.empty() || windows.empty()) fail(ErrorKind::contract, "empty tower or window set");
    const CellDecomposition& top = tower.back();
    const int n = top.level;
    for (const Word& o : windows)
        if (static_cast<int>(o.size()) != n)
            fail(ErrorKind::contract, "window length must match the tower level");
    const double lambda = top.rule->lambda_default;
    std::vector<double> vals(top.tile_count());
    for (int i = 0; i < top.tile_count(); ++i) {
        Word w = top.tile_address(i);
        double best = std::numeric_limits<double>::infinity();
        for (const Word& o : windows) {
            if (w == o) {
                best = 0;
                break;
            }
            best = std::min(best, word_quasi_distance(tower, w, o, lambda));
        }
        vals[i] = std::pow(best, alpha);
    }
    return table_potential(std::move(vals), n, alpha);
}

void save_table(const SubdivisionRule& rule, const Potential& p, const std::string& path) {
    require_table(p, "save_table");
    nlohmann::json j;
    j["rule"] = rule.name;
    j["level"] = p.level;
    j["alpha"] = p.alpha;
    nlohmann::json vals = nlohmann::json::object();
    std::vector<Word> words = enumerate_words(rule, p.level);
    if (words.size() != p.values.size())
        fail(ErrorKind::validation, "table length does not match the word count");
    for (size_t i = 0; i < words.size(); ++i) vals[serialize_word(rule, words[i])] = p.values[i];
    j["values"] = std::move(vals);
    std::ofstream out(path);
    if (!out) fail(ErrorKind::resource, "cannot write " + path);
    out << j.dump(2) << '\n';
}

Potential load_table(const std::shared_ptr<const SubdivisionRule>& rule, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::resource, "cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorKind::validation, std::string("bad table file: ") + e.what());
    }
    int level = j.at("level").get<int>();
    double alpha = j.value("alpha", 1.0);
    CylinderGraph g = cylinder_graph(rule, level);
    std::vector<double> vals(g.node_count(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& [key, value] : j.at("values").items()) {
        int idx = g.index_of(parse_word(*rule, key));
        if (idx < 0) fail(ErrorKind::validation, "inadmissible word in table: " + key);
        vals[idx] = value.get<double>();
    }
    for (double v : vals)
        if (std::isnan(v)) fail(ErrorKind::validation, "table file misses some words");
    return table_potential(std::move(vals), level, alpha);
}

}  // namespace etm
