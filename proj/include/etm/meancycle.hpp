#pragma once

#include <string>
#include <vector>

#include "etm/error.hpp"
#include "etm/symbolic.hpp"

namespace etm {

/// Weighted digraph for the mean-cycle solvers. Arc order within out[v] is
/// the tie-break order everywhere (argmax picks the earliest arc).
struct Digraph {
    struct Arc {
        int to;
        double w;
    };
    int n = 0;
    std::vector<std::vector<Arc>> out;
};

enum class MeanCycleMethod { automatic, karp, howard, brute };

struct MaxMeanResult {
    double q = 0.0;
    std::vector<int> cycle;  // closed walk (first node not repeated at the end)
    MeanCycleMethod method = MeanCycleMethod::automatic;
    /// Optimality data: Howard's gain-bias pair per node (q = max gain,
    /// w(v,u) - g + h(u) <= h(v) for all arcs at the top gain class), or
    /// Karp's final dynamic-programming row.
    std::vector<double> certificate;
};

std::vector<std::vector<int>> strongly_connected_components(const Digraph& g);

/// Maximum mean cycle. Requires a strongly connected graph; otherwise throws
/// Error{validation} naming a stranded component. `automatic` picks brute for
/// <= 12 nodes, Karp for <= 1024, Howard beyond.
MaxMeanResult max_mean_cycle(const Digraph& g, MeanCycleMethod method = MeanCycleMethod::automatic);

/// Shift graph with node weights: every arc out of v carries psi[v].
Digraph node_weighted_digraph(const CylinderGraph& g, const std::vector<double>& psi);

/// Mean of a closed walk; the walk is validated against the graph.
double cycle_mean(const Digraph& g, const std::vector<int>& cycle);

}  // namespace etm
