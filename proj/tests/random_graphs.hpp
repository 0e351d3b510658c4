#pragma once

// Shared generator for mean-cycle oracle comparisons: a random permutation
// cycle keeps the graph strongly connected, then extra arcs are sprinkled in.

#include <algorithm>
#include <random>

#include "etm/meancycle.hpp"

inline etm::Digraph random_scc_digraph(std::mt19937& rng, int n, double extra_arc_prob) {
    std::uniform_real_distribution<double> w(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    etm::Digraph g;
    g.n = n;
    g.out.resize(n);
    for (int i = 0; i < n; ++i) g.out[perm[i]].push_back({perm[(i + 1) % n], w(rng)});
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
            if (coin(rng) >= extra_arc_prob) continue;
            bool dup = false;
            for (const auto& arc : g.out[v]) dup |= arc.to == u;
            if (!dup) g.out[v].push_back({u, w(rng)});
        }
    return g;
}
