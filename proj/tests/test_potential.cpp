#include <cmath>
#include <cstdio>
#include <numeric>

#include "doctest.h"
#include "etm/potential.hpp"
#include "etm/symbolic.hpp"

using namespace etm;

namespace {

std::shared_ptr<const SubdivisionRule> pillow() {
    return std::make_shared<SubdivisionRule>(load_builtin("pillow_lattes"));
}

}  // namespace

TEST_CASE("discretization: constants pass through, tables are idempotent") {
    auto r = pillow();
    Potential c = constant_potential(2.5);
    Potential t = discretize(r, c, 3);
    CHECK(t.level == 3);
    CHECK(static_cast<int>(t.values.size()) == 2 * 4 * 4 * 4);
    for (double v : t.values) CHECK(v == doctest::Approx(2.5));
    Potential again = discretize(r, t, 3);
    CHECK(again.values == t.values);
    CHECK_THROWS_AS(discretize(r, t, 4), Error);
}

TEST_CASE("level-1 x-coordinate table lands inside the quadrant x-ranges") {
    auto r = pillow();
    Potential t = discretize(r, coordinate_potential(0), 1);
    REQUIRE(t.values.size() == 8);
    auto words = enumerate_words(*r, 1);
    for (size_t i = 0; i < words.size(); ++i) {
        // each 1-tile is an axis-aligned half-unit square; the representative
        // must carry an x-value inside that square
        Vec2 lo = r->tiles[words[i][0]].corners[0];
        double xmin = lo.x, xmax = lo.x;
        for (const Vec2& c : r->tiles[words[i][0]].corners) {
            xmin = std::min(xmin, c.x);
            xmax = std::max(xmax, c.x);
        }
        CHECK(t.values[i] >= xmin - 1e-12);
        CHECK(t.values[i] <= xmax + 1e-12);
    }
}

TEST_CASE("representatives stay inside their cylinders, pockets included") {
    auto f = std::make_shared<SubdivisionRule>(load_builtin("flap"));
    auto reps = cylinder_representatives(f, 2);
    CellDecomposition d = refine(f, 2);
    REQUIRE(static_cast<int>(reps.size()) == d.tile_count());
    for (int i = 0; i < d.tile_count(); ++i) {
        CHECK(reps[i].sheet == d.tile_sheet[i]);
        CHECK(point_in_convex_polygon(reps[i].pos, d.tile_polygon(i), 1e-9));
    }
}

TEST_CASE("birkhoff sums: zero terms, constants, additivity, cycles") {
    auto r = pillow();
    Potential t = discretize(r, random_smooth_potential(11), 2);
    Word cyc{1, 5};  // FB <-> BB is a 2-cycle on the pillow
    REQUIRE(r->admissible(1, 5));
    REQUIRE(r->admissible(5, 1));
    Word w;
    for (int k = 0; k < 4; ++k) w.insert(w.end(), cyc.begin(), cyc.end());

    CHECK(birkhoff_sum(r, t, w, 0) == 0.0);
    Potential c = discretize(r, constant_potential(1.5), 2);
    CHECK(birkhoff_sum(r, c, w, 4) == doctest::Approx(6.0));

    double s4 = birkhoff_sum(r, t, w, 4);
    double s2 = birkhoff_sum(r, t, w, 2);
    Word shifted(w.begin() + 2, w.end());
    CHECK(s4 == doctest::Approx(s2 + birkhoff_sum(r, t, shifted, 2)).epsilon(1e-12));

    double per = birkhoff_cycle_sum(r, t, cyc);
    CHECK(birkhoff_sum(r, t, w, 2) == doctest::Approx(per).epsilon(1e-12));

    CHECK_THROWS_AS(birkhoff_sum(r, t, Word{1, 5}, 5), Error);
}

TEST_CASE("closed-form and table birkhoff sums agree on long cylinders") {
    auto r = pillow();
    Potential p = random_smooth_potential(3);
    Potential t = discretize(r, p, 6);
    Word cyc = canonical_extension(*r, Word{2}).cycle;
    REQUIRE(!cyc.empty());
    double exact = birkhoff_cycle_sum(r, p, cyc);
    double table = birkhoff_cycle_sum(r, t, cyc);
    // representative error <= Lip * diam(6-tile) per term
    CHECK(std::abs(exact - table) <
          static_cast<double>(cyc.size()) * 40.0 * std::sqrt(2.0) / 64.0);
}

TEST_CASE("holder seminorm estimate: constants, homogeneity, subadditivity") {
    auto r = pillow();
    Potential c = discretize(r, constant_potential(7), 3);
    CHECK(holder_seminorm_estimate(r, c, 1.0).seminorm_est == 0.0);

    Potential t = discretize(r, random_smooth_potential(5), 3);
    double e1 = holder_seminorm_estimate(r, t, 1.0).seminorm_est;
    CHECK(e1 > 0.0);
    Potential t3 = t;
    for (double& v : t3.values) v *= -3.0;
    CHECK(holder_seminorm_estimate(r, t3, 1.0).seminorm_est == doctest::Approx(3 * e1));

    Potential u = discretize(r, random_smooth_potential(6), 3);
    Potential sum = t;
    for (size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += u.values[i];
    double eu = holder_seminorm_estimate(r, u, 1.0).seminorm_est;
    double es = holder_seminorm_estimate(r, sum, 1.0).seminorm_est;
    CHECK(es <= e1 + eu + 1e-12);

    double em = holder_seminorm_estimate(r, t, 1.0, MetricKind::model).seminorm_est;
    CHECK(em > 0.0);
}

TEST_CASE("variation bound: constants vanish, smooth ratios stay stable in n") {
    auto r = pillow();
    auto rep0 = variation_bound_check(r, constant_potential(4), 2, 4, 50, 1);
    CHECK(rep0.c_hat == 0.0);
    Potential p = random_smooth_potential(9);
    auto rep2 = variation_bound_check(r, p, 2, 5, 150, 2);
    auto rep3 = variation_bound_check(r, p, 3, 6, 150, 3);
    CHECK(rep2.c_hat > 0.0);
    CHECK(rep3.c_hat > 0.0);
    CHECK(rep3.c_hat < 4.0 * rep2.c_hat);
    CHECK(rep2.c_hat < 4.0 * rep3.c_hat);
}

TEST_CASE("distance potential vanishes on the orbit and is positive far away") {
    auto r = pillow();
    std::vector<ModelPoint> orbit{{0, {2.0 / 3, 0}}, {1, {2.0 / 3, 0}}};
    Potential dp = distance_potential(r, orbit, 1.0);
    CHECK(dp.fn(orbit[0]) == doctest::Approx(0.0));
    CHECK(dp.fn({0, {0.1, 0.9}}) > 0.5);
    // cross-sheet distances go through the seam and stay finite
    CHECK(std::isfinite(dp.fn({1, {0.5, 0.5}})));
    CHECK(dp.fn({1, {2.0 / 3, 0.1}}) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("symbolic distance table is zero exactly on the windows") {
    auto r = pillow();
    auto tower = refine_tower(r, 3);
    Word cyc{1, 5, 1};  // any cyclic window set; admissibility checked first
    Word a{1, 5, 1}, b{5, 1, 5};
    REQUIRE(r->admissible(1, 5));
    REQUIRE(r->admissible(5, 1));
    Potential t = distance_potential_table(tower, {a, b}, 1.0);
    const auto& top = tower.back();
    int zero = 0;
    for (int i = 0; i < top.tile_count(); ++i) {
        if (t.values[i] == 0.0) {
            ++zero;
            Word w = top.tile_address(i);
            CHECK((w == a || w == b));
        } else {
            CHECK(t.values[i] > 0.0);
        }
    }
    CHECK(zero == 2);
    (void)cyc;
}

TEST_CASE("tables survive a JSON round trip") {
    auto r = pillow();
    Potential t = discretize(r, random_smooth_potential(17), 2);
    std::string path = "potential_roundtrip.json";
    save_table(*r, t, path);
    Potential back = load_table(r, path);
    CHECK(back.level == t.level);
    CHECK(back.alpha == doctest::Approx(t.alpha));
    REQUIRE(back.values.size() == t.values.size());
    for (size_t i = 0; i < t.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(t.values[i]).epsilon(1e-12));
    std::remove(path.c_str());
}
