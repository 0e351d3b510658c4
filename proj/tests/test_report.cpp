#include <json.hpp>

#include "doctest.h"
#include "etm/report.hpp"

using namespace etm;
using nlohmann::json;

namespace {

std::shared_ptr<const SubdivisionRule> pillow() {
    return std::make_shared<SubdivisionRule>(load_builtin("pillow_lattes"));
}

int count_occurrences(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("svg path count equals tile count") {
    auto r = pillow();
    CHECK(count_occurrences(render_svg(refine(r, 0)), "<path") == 2);
    CHECK(count_occurrences(render_svg(refine(r, 3)), "<path") == 128);

    auto bary = std::make_shared<SubdivisionRule>(load_builtin("barycentric"));
    CHECK(count_occurrences(render_svg(refine(bary, 1)), "<path") == 12);
}

TEST_CASE("svg highlights add one overlay path per tile in the set") {
    auto r = pillow();
    CellDecomposition d = refine(r, 3);
    int v = -1;
    for (int i = 0; i < d.vertex_count() && v < 0; ++i)
        if (d.vertex_local_degree(i) == 2) v = i;
    REQUIRE(v >= 0);
    auto tiles = flower(d, v);
    REQUIRE(tiles.size() == 4);

    RenderOptions opt;
    opt.highlights.push_back({"flower", tiles, "#e05252"});
    std::string svg = render_svg(d, opt);
    CHECK(count_occurrences(svg, "<path") == 128 + 4);
    CHECK(count_occurrences(svg, "data-label=\"flower\"") == 1);
    CHECK(svg.find("fill-opacity") != std::string::npos);
}

TEST_CASE("decomposition json carries the full complex") {
    auto r = pillow();
    CellDecomposition d = refine(r, 2);
    json doc = json::parse(decomposition_json(d));
    CHECK(doc["version"] == 1);
    CHECK(doc["rule"] == "pillow_lattes");
    CHECK(doc["level"] == 2);
    CHECK(doc["tiles"].size() == static_cast<size_t>(d.tile_count()));
    CHECK(doc["edges"].size() == static_cast<size_t>(d.edge_count()));
    CHECK(doc["vertices"].size() == static_cast<size_t>(d.vertex_count()));

    const json& t0 = doc["tiles"][0];
    CHECK(t0["address"].size() == 2);
    CHECK(t0["polygon"].size() == static_cast<size_t>(d.m()));
    CHECK(t0["edges"].size() == static_cast<size_t>(d.m()));
    CHECK(t0.contains("map"));

    // every edge/vertex id referenced by a tile exists
    for (const json& tile : doc["tiles"]) {
        for (int e : tile["edges"].get<std::vector<int>>()) CHECK(e < d.edge_count());
        for (int v : tile["corners"].get<std::vector<int>>()) CHECK(v < d.vertex_count());
    }
}

TEST_CASE("transition json: columns sum to the degree") {
    auto r = pillow();
    json doc = json::parse(transition_json(*r));
    int states = doc["states"].get<int>();
    REQUIRE(states == r->tile_count());
    std::vector<int> indegree(states, 0);
    for (const json& row : doc["successors"])
        for (int y : row.get<std::vector<int>>()) ++indegree[y];
    for (int y = 0; y < states; ++y) CHECK(indegree[y] == r->degree);
}

TEST_CASE("cylinder graph json matches the graph") {
    auto r = pillow();
    CylinderGraph g = cylinder_graph(r, 2);
    json doc = json::parse(cylinder_graph_json(g));
    REQUIRE(doc["nodes"].get<int>() == g.node_count());
    CHECK(doc["words"][0].size() == 2);
    for (int v = 0; v < g.node_count(); ++v)
        CHECK(doc["successors"][v].get<std::vector<int>>() == g.successors(v));
}

TEST_CASE("tpo report json and sweep csv round out the artifacts") {
    auto r = pillow();
    TpoReport rep = tpo_pipeline(r, constant_potential(1.0), 3, 0.1, 1.0, {0.2, 1.0}, 1.0);
    CylinderGraph g = cylinder_graph(r, 3);
    LockingResult lock = locking_test(r, g, rep.phi_prime, 3, rep.epsilon / 10, 1);

    json doc = json::parse(tpo_report_json(*r, rep, lock));
    CHECK(doc["success"] == rep.success);
    CHECK(doc["orbit"]["period"] == rep.orbit.period);
    CHECK(doc["locking"]["count"] == 3);
    CHECK(doc["q_before"].get<double>() == doctest::Approx(1.0));

    auto sweep = zero_temperature_sweep(g, rep.phi_prime, {1.0, 2.0},
                                        cyclic_windows(rep.orbit.word, 3));
    std::string csv = sweep_csv(sweep);
    CHECK(csv.rfind("t,tv_distance\n", 0) == 0);
    CHECK(count_occurrences(csv, "\n") == 3);
}
