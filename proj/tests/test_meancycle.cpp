#include <doctest.h>

#include <random>

#include "etm/meancycle.hpp"
#include "etm/symbolic.hpp"
#include "random_graphs.hpp"

using namespace etm;

TEST_CASE("two-node oracle: heavy self-loop wins") {
    Digraph g;
    g.n = 2;
    g.out = {{{0, 1.0}, {1, 0.0}}, {{1, 3.0}, {0, 0.0}}};
    for (auto method : {MeanCycleMethod::brute, MeanCycleMethod::karp, MeanCycleMethod::howard}) {
        auto r = max_mean_cycle(g, method);
        CHECK(r.q == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(r.cycle == std::vector<int>{1});
    }
}

TEST_CASE("constant weights give q = c on any cycle") {
    Digraph g;
    g.n = 3;
    g.out = {{{1, 0.7}}, {{2, 0.7}}, {{0, 0.7}, {1, 0.7}}};
    auto r = max_mean_cycle(g);
    CHECK(r.q == doctest::Approx(0.7));
}

TEST_CASE("adding a constant shifts q and keeps the argmax cycle") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Digraph g = random_scc_digraph(rng, 9, 0.25);
        auto base = max_mean_cycle(g, MeanCycleMethod::howard);
        Digraph h = g;
        for (auto& arcs : h.out)
            for (auto& a : arcs) a.w += 2.5;
        auto shifted = max_mean_cycle(h, MeanCycleMethod::howard);
        CHECK(shifted.q == doctest::Approx(base.q + 2.5).epsilon(1e-12));
        CHECK(min_rotation(Word(shifted.cycle.begin(), shifted.cycle.end())) ==
              min_rotation(Word(base.cycle.begin(), base.cycle.end())));
    }
}

TEST_CASE("three methods agree on random small graphs") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        Digraph g = random_scc_digraph(rng, 4 + static_cast<int>(rng() % 9), 0.3);
        auto b = max_mean_cycle(g, MeanCycleMethod::brute);
        auto k = max_mean_cycle(g, MeanCycleMethod::karp);
        auto h = max_mean_cycle(g, MeanCycleMethod::howard);
        CHECK(std::abs(b.q - k.q) <= 1e-12);
        CHECK(std::abs(b.q - h.q) <= 1e-12);
        CHECK(cycle_mean(g, k.cycle) == doctest::Approx(b.q).epsilon(1e-12));
        CHECK(cycle_mean(g, h.cycle) == doctest::Approx(b.q).epsilon(1e-12));
    }
}

TEST_CASE("karp equals howard on medium graphs") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        Digraph g = random_scc_digraph(rng, 60, 0.05);
        auto k = max_mean_cycle(g, MeanCycleMethod::karp);
        auto h = max_mean_cycle(g, MeanCycleMethod::howard);
        CHECK(std::abs(k.q - h.q) <= 1e-12);
    }
}

TEST_CASE("howard certificate proves optimality") {
    std::mt19937 rng(47);
    Digraph g = random_scc_digraph(rng, 30, 0.15);
    auto h = max_mean_cycle(g, MeanCycleMethod::howard);
    // On a strongly connected graph the top gain is global: every arc must
    // satisfy w(v,u) - q + bias(u) <= bias(v) up to tie tolerance.
    for (int v = 0; v < g.n; ++v)
        for (const auto& arc : g.out[v])
            CHECK(arc.w - h.q + h.certificate[arc.to] <= h.certificate[v] + 1e-9);
}

TEST_CASE("disconnected graphs are rejected with a stranded component") {
    Digraph g;
    g.n = 3;
    g.out = {{{0, 1.0}}, {{2, 0.0}}, {{1, 0.0}}};  // node 0 unreachable from 1,2
    CHECK_THROWS_WITH_AS(max_mean_cycle(g), doctest::Contains("stranded"), Error);
}

TEST_CASE("determinism: same graph, same cycle, twice") {
    std::mt19937 rng(5);
    Digraph g = random_scc_digraph(rng, 50, 0.1);
    auto a = max_mean_cycle(g, MeanCycleMethod::howard);
    auto b = max_mean_cycle(g, MeanCycleMethod::howard);
    CHECK(a.q == b.q);
    CHECK(a.cycle == b.cycle);
}

TEST_CASE("node-weighted cylinder graph with constant weight") {
    auto rule = std::make_shared<SubdivisionRule>(load_builtin("pillow_lattes"));
    auto g = cylinder_graph(rule, 2);
    std::vector<double> psi(g.node_count(), 1.0);
    auto d = node_weighted_digraph(g, psi);
    auto r = max_mean_cycle(d, MeanCycleMethod::karp);
    CHECK(r.q == doctest::Approx(1.0));
}
