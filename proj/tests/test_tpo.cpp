#include <cmath>

#include "doctest.h"
#include "etm/tpo.hpp"

using namespace etm;

namespace {

std::shared_ptr<const SubdivisionRule> pillow() {
    return std::make_shared<SubdivisionRule>(load_builtin("pillow_lattes"));
}

}  // namespace

TEST_CASE("cyclic windows unroll the periodic word") {
    Word cyc{1, 5};
    auto ws = cyclic_windows(cyc, 3);
    REQUIRE(ws.size() == 2);
    CHECK(ws[0] == Word{1, 5, 1});
    CHECK(ws[1] == Word{5, 1, 5});
    CHECK(cyclic_windows(Word{0}, 4).size() == 1);
}

TEST_CASE("constant potentials lock onto the discovered orbit") {
    auto r = pillow();
    TpoReport rep = tpo_pipeline(r, constant_potential(1.0), 3, 0.1, 1.0, {0.2, 1.0}, 1.0);
    CHECK(rep.q_before == doctest::Approx(1.0));
    CHECK(rep.success);
    CHECK(rep.margin > 0.0);
    CHECK(rep.cycle_after == min_rotation(rep.orbit.word));
    CHECK(rep.q_after == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pipeline on smooth potentials: unique argmax equals O, q matches") {
    auto r = pillow();
    for (unsigned seed : {101u, 102u}) {
        TpoReport rep =
            tpo_pipeline(r, random_smooth_potential(seed), 4, 0.0, 1.0, {0.2, 1.0}, 1.0);
        CHECK(rep.success);
        CHECK(rep.margin > 0.0);
        double mean = birkhoff_cycle_sum(r, rep.phi_prime, rep.orbit.word) /
                      static_cast<double>(rep.orbit.period);
        CHECK(std::abs(rep.q_after - mean) <= 1e-9);
        CHECK(rep.q_after <= rep.q_before + 1e-12);
    }
}

TEST_CASE("locking survives holder-bounded perturbations at a tenth of epsilon") {
    auto r = pillow();
    TpoReport rep = tpo_pipeline(r, random_smooth_potential(7), 4, 0.0, 1.0, {0.2, 1.0}, 1.0);
    REQUIRE(rep.success);
    CylinderGraph g = cylinder_graph(r, 4);

    LockingResult zero = locking_test(r, g, rep.phi_prime, 5, 0.0, 1);
    CHECK(zero.successes == 5);

    LockingResult res = locking_test(r, g, rep.phi_prime, 10, rep.epsilon / 10.0, 2);
    CHECK(res.count == 10);
    CHECK(res.successes == 10);

    LockingResult repeat = locking_test(r, g, rep.phi_prime, 10, rep.epsilon / 10.0, 2);
    CHECK(repeat.successes == res.successes);
}

TEST_CASE("equilibrium states: uniformity at t = 0 and for constants") {
    auto r = pillow();
    CylinderGraph g = cylinder_graph(r, 3);
    const int n = g.node_count();

    Potential zero = table_potential(std::vector<double>(n, 0.0), 3);
    GibbsVector mu = equilibrium_state(g, zero, 0.0);
    double sum = 0;
    for (double w : mu.weights) {
        CHECK(w == doctest::Approx(1.0 / n).epsilon(1e-10));
        CHECK(w > 0.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    Potential c = table_potential(std::vector<double>(n, -0.7), 3);
    GibbsVector mu2 = equilibrium_state(g, c, 13.0);
    for (int v = 0; v < n; ++v) CHECK(mu2.weights[v] == doctest::Approx(1.0 / n).epsilon(1e-10));
}

TEST_CASE("ground-state sweep concentrates on the locked orbit") {
    auto r = pillow();
    TpoReport rep = tpo_pipeline(r, random_smooth_potential(19), 4, 0.0, 1.0, {0.2, 1.0}, 1.0);
    REQUIRE(rep.success);
    CylinderGraph g = cylinder_graph(r, 4);
    auto windows = cyclic_windows(rep.orbit.word, 4);

    auto single = zero_temperature_sweep(g, rep.phi_prime, {0.0}, windows);
    CHECK(single.size() == 1);

    std::vector<double> ts{1, 2, 4, 8, 16, 32, 64, 128, 256};
    auto sweep = zero_temperature_sweep(g, rep.phi_prime, ts, windows);
    REQUIRE(sweep.size() == ts.size());
    CHECK(sweep.back().tv < 0.05);
    CHECK(sweep.back().tv < sweep.front().tv);

    // mass on the orbit windows at large t
    GibbsVector mu = equilibrium_state(g, rep.phi_prime, 256.0);
    double mass = 0;
    for (const Word& w : windows) mass += mu.weights[g.index_of(w)];
    CHECK(mass >= 0.95);

    CHECK_THROWS_AS(zero_temperature_sweep(g, rep.phi_prime, {2.0, 1.0}, windows), Error);
}
