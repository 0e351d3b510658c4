#include <cmath>
#include <random>

#include "doctest.h"
#include "etm/closing.hpp"
#include "etm/ergopt.hpp"

using namespace etm;

namespace {

std::shared_ptr<const SubdivisionRule> pillow() {
    return std::make_shared<SubdivisionRule>(load_builtin("pillow_lattes"));
}

Word random_closed_word(const SubdivisionRule& r, int len, std::mt19937& rng) {
    for (;;) {
        Word w;
        std::uniform_int_distribution<int> pick(0, r.tile_count() - 1);
        w.push_back(static_cast<uint8_t>(pick(rng)));
        while (static_cast<int>(w.size()) < len) {
            std::vector<int> next;
            for (int a = 0; a < r.tile_count(); ++a)
                if (r.admissible(w.back(), a)) next.push_back(a);
            w.push_back(static_cast<uint8_t>(next[rng() % next.size()]));
        }
        if (r.admissible(w.back(), w.front())) return w;
    }
}

}  // namespace

TEST_CASE("gap formulas, including the empty-minimum convention") {
    PeriodicOrbit fixed;
    fixed.period = 1;
    fixed.gap_value = std::numeric_limits<double>::infinity();
    CHECK(gap(fixed) == std::numeric_limits<double>::infinity());
    CHECK(r_theta_gap(fixed, {1.0, 0.1}) == 1.0);

    PeriodicOrbit pair;
    pair.period = 2;
    pair.gap_value = 0.5;
    CHECK(r_theta_gap(pair, {1.0, 0.1}) == doctest::Approx(0.05));
    CHECK(r_theta_gap(pair, {0.01, 0.1}) == doctest::Approx(0.01));
    CHECK_THROWS_AS(r_theta_gap(pair, {0.0, 1.0}), Error);
}

TEST_CASE("pillow critical points are the six degree-2 vertices") {
    auto r = pillow();
    auto crit = critical_points(r);
    CHECK(crit.size() == 6);
    // two face centers and four seam midpoints
    int centers = 0, seam = 0;
    for (const auto& c : crit) {
        if (dist(c.pos, {0.5, 0.5}) < 1e-12) ++centers;
        if (std::abs(c.pos.x - 0.5) < 1e-12 || std::abs(c.pos.y - 0.5) < 1e-12) {
            if (dist(c.pos, {0.5, 0.5}) > 1e-12) ++seam;
        }
    }
    CHECK(centers == 2);
    CHECK(seam == 4);
}

TEST_CASE("periodic points: fixed point, primitive reduction, admissibility") {
    auto r = pillow();
    PeriodicOrbit o = periodic_point_from_cycle(*r, Word{0});
    CHECK(o.period == 1);
    CHECK(gap(o) == std::numeric_limits<double>::infinity());
    CHECK(dist(o.points[0].pos, r->tiles[0].corners[0]) < 1e-12);

    PeriodicOrbit doubled = periodic_point_from_cycle(*r, Word{0, 0});
    CHECK(doubled.period == 1);

    // find an ordered pair admissible one way only
    bool checked = false;
    for (int a = 0; a < r->tile_count() && !checked; ++a)
        for (int b = 0; b < r->tile_count() && !checked; ++b)
            if (r->admissible(a, b) && !r->admissible(b, a)) {
                CHECK_THROWS_AS(periodic_point_from_cycle(
                                    *r, Word{static_cast<uint8_t>(a), static_cast<uint8_t>(b)}),
                                Error);
                checked = true;
            }
    CHECK(checked);

    std::mt19937 rng(4);
    Word cyc = random_closed_word(*r, 5, rng);
    PeriodicOrbit big = periodic_point_from_cycle(*r, cyc);
    CHECK(big.period >= 1);
    CHECK(static_cast<int>(big.points.size()) == big.period);
    if (big.period > 1) {
        double g = std::numeric_limits<double>::infinity();
        for (int i = 0; i < big.period; ++i)
            for (int j = i + 1; j < big.period; ++j)
                g = std::min(g, glued_distance(*r, big.points[i], big.points[j]));
        CHECK(gap(big) == doctest::Approx(g));
    }
}

TEST_CASE("bq search honors the period budget and finds self-loops") {
    auto r = pillow();
    CylinderGraph g = cylinder_graph(r, 3);
    CellDecomposition dec = refine(r, 3);

    Word self{0, 0, 0};
    int node = g.index_of(self);
    REQUIRE(node >= 0);
    PeriodicOrbit o = bq_search(g, dec, {node}, 2.0, 0.05);
    CHECK(o.period == 1);
    CHECK(o.word == Word{0});

    Potential psi = discretize(r, random_smooth_potential(13), 3);
    auto res = q_value(g, psi);
    BouschState sub = calibrated_subaction(g, psi, res.q);
    auto K = maximizing_set(g, mane_normalize(g, psi, sub, res.q), 1e-9);
    for (double eps : {0.2, 0.1}) {
        PeriodicOrbit ok = bq_search(g, dec, K, 2.0, eps);
        CHECK(ok.period < std::pow(1.0 / eps, 2.0));
    }

    // budget of 1 can never be met
    CHECK_THROWS_AS(bq_search(g, dec, K, 0.05, 0.9), Error);
}

TEST_CASE("anosov closing of self-shadowing words decays at the expansion rate") {
    auto r = pillow();
    std::mt19937 rng(8);
    const int l = 9, ctx = 5;
    int successes = 0;
    for (int trial = 0; trial < 12 && successes < 4; ++trial) {
        Word w = random_closed_word(*r, l, rng);
        Word full = w;
        for (int i = 0; i < ctx; ++i) full.push_back(w[i]);
        double delta = 2.0 * std::pow(2.0, -ctx);
        ShadowReport rep;
        try {
            rep = local_anosov_close(r, full, l, delta, 1e-3);
        } catch (const Error&) {
            continue;  // pseudo-orbit strayed near a critical point; redraw
        }
        ++successes;
        CHECK(rep.repaired == 0);  // suffix repeats the prefix, so it closes as-is
        CHECK(rep.orbit.period >= 1);
        CHECK(std::isfinite(rep.beta_hat));
        // pillow pieces are similarities of ratio 1/2: slope -log 2 up to fit noise
        CHECK(rep.slope < -0.8 * std::log(2.0));
        CHECK(rep.slope > -1.3 * std::log(2.0));
    }
    CHECK(successes >= 4);

    // an absurd eta makes every tile "near-critical"
    Word w = random_closed_word(*r, l, rng);
    Word full = w;
    for (int i = 0; i < ctx; ++i) full.push_back(w[i]);
    CHECK_THROWS_AS(local_anosov_close(r, full, l, 1.0, 10.0), Error);
}

TEST_CASE("gap-bounded recursion terminates with the inequality verified") {
    auto r = pillow();
    CylinderGraph g = cylinder_graph(r, 4);
    CellDecomposition dec = refine(r, 4);

    Word self{0, 0, 0, 0};
    int node = g.index_of(self);
    REQUIRE(node >= 0);
    GapBoundReport fixed = bound_by_gap(g, dec, {node}, {0.2, 1.0}, 1.0, 1.0);
    CHECK(fixed.orbit.period == 1);
    CHECK(fixed.lhs <= fixed.rhs);

    std::mt19937 rng(6);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> vals(g.node_count());
    for (double& x : vals) x = d(rng);
    Potential rough = table_potential(vals, 4);
    auto res = q_value(g, rough);
    BouschState sub = calibrated_subaction(g, rough, res.q);
    auto K = maximizing_set(g, mane_normalize(g, rough, sub, res.q), 1e-9);

    GapBoundReport rep = bound_by_gap(g, dec, K, {0.2, 1.0}, 1.0, 1.0);
    CHECK(rep.lhs <= rep.rhs);
    CHECK(static_cast<int>(rep.periods.size()) <=
          static_cast<int>(std::log2(std::max(2, rep.periods.front()))) + 3);
    for (size_t i = 1; i < rep.periods.size(); ++i)
        CHECK(rep.periods[i] <= rep.periods[i - 1] / 2 + 1);

    // huge tau: the first orbit is already good enough
    GapBoundReport lax = bound_by_gap(g, dec, K, {0.2, 1.0}, 1.0, 1e9);
    CHECK(lax.periods.size() == 1);
}

TEST_CASE("pillow expansion ratios are exactly the similarity powers") {
    auto r = pillow();
    ExpansionReport rep = uniform_expansion_check(r, 300, 0.03, 3, 12);
    CHECK(rep.samples == 300);
    CHECK(rep.min_ratio == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(rep.max_ratio == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(rep.c2_hat == doctest::Approx(1.0).epsilon(1e-9));
}
