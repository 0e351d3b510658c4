#include "etm/meancycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace etm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-12;

// Iterative Tarjan (cylinder graphs get large enough to overflow the stack).
struct Tarjan {
    const Digraph& g;
    std::vector<int> index, low, comp;
    std::vector<char> on_stack;
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;

    explicit Tarjan(const Digraph& gg)
        : g(gg), index(gg.n, -1), low(gg.n, 0), comp(gg.n, -1), on_stack(gg.n, 0) {}

    void run(int root) {
        struct Frame {
            int v;
            size_t arc;
        };
        std::vector<Frame> call;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, arc] = call.back();
            if (arc < g.out[v].size()) {
                int u = g.out[v][arc++].to;
                if (index[u] < 0) {
                    index[u] = low[u] = counter++;
                    stack.push_back(u);
                    on_stack[u] = 1;
                    call.push_back({u, 0});
                } else if (on_stack[u]) {
                    low[v] = std::min(low[v], index[u]);
                }
            } else {
                if (low[v] == index[v]) {
                    std::vector<int> scc;
                    int u;
                    do {
                        u = stack.back();
                        stack.pop_back();
                        on_stack[u] = 0;
                        comp[u] = static_cast<int>(sccs.size());
                        scc.push_back(u);
                    } while (u != v);
                    std::sort(scc.begin(), scc.end());
                    sccs.push_back(std::move(scc));
                }
                int done = v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[done]);
            }
        }
    }
};

void require_strongly_connected(const Digraph& g) {
    auto sccs = strongly_connected_components(g);
    if (sccs.size() <= 1) return;
    // Report the smallest component; it is the most readable witness.
    const std::vector<int>* worst = &sccs[0];
    for (const auto& s : sccs)
        if (s.size() < worst->size()) worst = &s;
    std::string ids;
    for (size_t i = 0; i < worst->size() && i < 8; ++i)
        ids += (i ? "," : "") + std::to_string((*worst)[i]);
    fail(ErrorKind::validation, "graph is not strongly connected; stranded component {" + ids +
                                    (worst->size() > 8 ? ",...}" : "}"));
}

MaxMeanResult solve_brute(const Digraph& g) {
    if (g.n > 12) fail(ErrorKind::contract, "brute-force cycle enumeration is capped at 12 nodes");
    MaxMeanResult best;
    best.method = MeanCycleMethod::brute;
    best.q = kNegInf;
    // Enumerate simple cycles: start at s, visit only nodes >= s.
    std::vector<int> path;
    std::vector<char> used(g.n, 0);
    double path_w = 0;
    auto dfs = [&](auto&& self, int s, int v) -> void {
        for (const auto& arc : g.out[v]) {
            if (arc.to == s) {
                double mean = (path_w + arc.w) / path.size();
                if (mean > best.q + kTieTol) {
                    best.q = mean;
                    best.cycle = path;
                }
            } else if (arc.to > s && !used[arc.to]) {
                used[arc.to] = 1;
                path.push_back(arc.to);
                path_w += arc.w;
                self(self, s, arc.to);
                path_w -= arc.w;
                path.pop_back();
                used[arc.to] = 0;
            }
        }
    };
    for (int s = 0; s < g.n; ++s) {
        path = {s};
        path_w = 0;
        dfs(dfs, s, s);
    }
    if (best.q == kNegInf) fail(ErrorKind::validation, "graph has no cycle");
    return best;
}

MaxMeanResult solve_karp(const Digraph& g) {
    const int n = g.n;
    if (n > 4096) fail(ErrorKind::resource, "Karp table is capped at 4096 nodes; use Howard");
    // D[k][v] = max weight of a length-k walk ending at v, from a virtual
    // source with zero-weight arcs everywhere (adds no cycles).
    std::vector<std::vector<double>> d(n + 1, std::vector<double>(n, kNegInf));
    std::vector<std::vector<int>> par(n + 1, std::vector<int>(n, -1));
    for (int v = 0; v < n; ++v) d[0][v] = 0;
    for (int k = 1; k <= n; ++k)
        for (int v = 0; v < n; ++v) {
            if (d[k - 1][v] == kNegInf) continue;
            for (const auto& arc : g.out[v]) {
                double cand = d[k - 1][v] + arc.w;
                if (cand > d[k][arc.to] + kTieTol) {
                    d[k][arc.to] = cand;
                    par[k][arc.to] = v;
                }
            }
        }
    MaxMeanResult res;
    res.method = MeanCycleMethod::karp;
    res.q = kNegInf;
    int best_v = -1;
    for (int v = 0; v < n; ++v) {
        if (d[n][v] == kNegInf) continue;
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            if (d[k][v] == kNegInf) continue;
            worst = std::min(worst, (d[n][v] - d[k][v]) / (n - k));
        }
        if (worst > res.q) {
            res.q = worst;
            best_v = v;
        }
    }
    if (best_v < 0) fail(ErrorKind::validation, "graph has no cycle");
    // The length-n walk into best_v repeats a node; the repeat is a max-mean cycle.
    std::vector<int> walk(n + 1);
    walk[n] = best_v;
    for (int k = n; k > 0; --k) walk[k - 1] = par[k][walk[k]];
    std::vector<int> seen(n, -1);
    for (int k = n; k >= 0; --k) {
        int v = walk[k];
        if (seen[v] >= 0) {
            for (int i = k; i < seen[v]; ++i) res.cycle.push_back(walk[i]);
            break;
        }
        seen[v] = k;
    }
    res.certificate = d[n];
    double check = cycle_mean(g, res.cycle);
    if (std::abs(check - res.q) > 1e-9)
        fail(ErrorKind::numeric, "Karp cycle reconstruction drifted from the computed mean");
    res.q = check;  // the cycle itself is the exact witness
    return res;
}

MaxMeanResult solve_howard(const Digraph& g) {
    const int n = g.n;
    for (int v = 0; v < n; ++v)
        if (g.out[v].empty()) fail(ErrorKind::validation, "node without outgoing arcs");
    std::vector<int> policy(n, 0);
    std::vector<double> gain(n, 0), bias(n, 0);

    // Evaluate the current policy (a functional graph: per-component cycle
    // mean = gain, back-substituted bias elsewhere).
    std::vector<int> state(n);
    auto evaluate = [&]() {
        std::fill(state.begin(), state.end(), 0);  // 0 new, 1 in progress, 2 done
        for (int s = 0; s < n; ++s) {
            if (state[s]) continue;
            std::vector<int> path;
            int v = s;
            while (state[v] == 0) {
                state[v] = 1;
                path.push_back(v);
                v = g.out[v][policy[v]].to;
            }
            if (state[v] == 1) {  // found a fresh cycle starting at v
                size_t start = 0;
                while (path[start] != v) ++start;
                double total = 0;
                for (size_t i = start; i < path.size(); ++i)
                    total += g.out[path[i]][policy[path[i]]].w;
                double gmean = total / static_cast<double>(path.size() - start);
                // anchor the bias at the least node id so the per-component
                // constant does not depend on traversal order; otherwise
                // equal-gain components shift against each other between
                // sweeps and the bias stage can switch policies forever
                size_t least = start;
                for (size_t i = start; i < path.size(); ++i)
                    if (path[i] < path[least]) least = i;
                std::rotate(path.begin() + start, path.begin() + least, path.end());
                v = path[start];
                // anchor bias 0 at the cycle entry, then close the loop backwards:
                // bias(u) = w(u, next) - gmean + bias(next)
                gain[v] = gmean;
                bias[v] = 0;
                for (size_t i = path.size(); i-- > start + 1;) {
                    int u = path[i];
                    int nx = g.out[u][policy[u]].to;
                    gain[u] = gmean;
                    bias[u] = g.out[u][policy[u]].w - gmean + (nx == v ? 0.0 : bias[nx]);
                }
                for (size_t i = start; i < path.size(); ++i) state[path[i]] = 2;
            }
            // tree part: back-substitute in reverse visit order
            size_t cut = path.size();
            while (cut > 0 && state[path[cut - 1]] == 2) --cut;
            for (size_t i = cut; i-- > 0;) {
                int u = path[i];
                int nx = g.out[u][policy[u]].to;
                gain[u] = gain[nx];
                bias[u] = g.out[u][policy[u]].w - gain[nx] + bias[nx];
                state[u] = 2;
            }
        }
    };

    int guard = 100 * n + 1000;
    while (guard-- > 0) {
        evaluate();
        bool changed = false;
        for (int v = 0; v < n; ++v) {
            const auto& arcs = g.out[v];
            int cur = policy[v];
            // stage 1: raise the reachable gain
            double gbest = gain[arcs[cur].to];
            int pick = -1;
            for (size_t i = 0; i < arcs.size(); ++i)
                if (gain[arcs[i].to] > gbest + kTieTol) {
                    gbest = gain[arcs[i].to];
                    pick = static_cast<int>(i);
                }
            if (pick >= 0) {
                policy[v] = pick;
                changed = true;
                continue;
            }
            // stage 2: best bias within the top gain class (argmax, smallest
            // index on ties, so the sweep is deterministic)
            double best_val = arcs[cur].w + bias[arcs[cur].to];
            pick = -1;
            for (size_t i = 0; i < arcs.size(); ++i) {
                if (gain[arcs[i].to] < gbest - kTieTol) continue;
                double val = arcs[i].w + bias[arcs[i].to];
                if (val > best_val + kTieTol) {
                    best_val = val;
                    pick = static_cast<int>(i);
                }
            }
            if (pick >= 0) {
                policy[v] = pick;
                changed = true;
            }
        }
        if (!changed) break;
    }
    if (guard <= 0) fail(ErrorKind::numeric, "policy iteration failed to stabilize");

    MaxMeanResult res;
    res.method = MeanCycleMethod::howard;
    res.q = kNegInf;
    int top = 0;
    for (int v = 0; v < n; ++v)
        if (gain[v] > res.q) {
            res.q = gain[v];
            top = v;
        }
    // walk the policy from the top-gain node into its cycle
    std::vector<int> pos(n, -1);
    std::vector<int> walk;
    int v = top;
    while (pos[v] < 0) {
        pos[v] = static_cast<int>(walk.size());
        walk.push_back(v);
        v = g.out[v][policy[v]].to;
    }
    res.cycle.assign(walk.begin() + pos[v], walk.end());
    res.certificate = bias;
    res.q = cycle_mean(g, res.cycle);
    return res;
}

}  // namespace

std::vector<std::vector<int>> strongly_connected_components(const Digraph& g) {
    Tarjan t(g);
    for (int v = 0; v < g.n; ++v)
        if (t.index[v] < 0) t.run(v);
    return t.sccs;
}

double cycle_mean(const Digraph& g, const std::vector<int>& cycle) {
    if (cycle.empty()) fail(ErrorKind::contract, "empty cycle");
    double total = 0;
    for (size_t i = 0; i < cycle.size(); ++i) {
        int v = cycle[i], u = cycle[(i + 1) % cycle.size()];
        bool found = false;
        for (const auto& arc : g.out[v])
            if (arc.to == u) {
                total += arc.w;
                found = true;
                break;
            }
        if (!found) fail(ErrorKind::contract, "walk uses a missing arc");
    }
    return total / static_cast<double>(cycle.size());
}

MaxMeanResult max_mean_cycle(const Digraph& g, MeanCycleMethod method) {
    if (g.n == 0) fail(ErrorKind::contract, "empty graph");
    require_strongly_connected(g);
    if (method == MeanCycleMethod::automatic)
        method = g.n <= 12    ? MeanCycleMethod::brute
                 : g.n <= 4096 ? MeanCycleMethod::karp
                               : MeanCycleMethod::howard;
    switch (method) {
        case MeanCycleMethod::brute:
            return solve_brute(g);
        case MeanCycleMethod::karp:
            return solve_karp(g);
        default:
            return solve_howard(g);
    }
}

Digraph node_weighted_digraph(const CylinderGraph& g, const std::vector<double>& psi) {
    if (static_cast<int>(psi.size()) != g.node_count())
        fail(ErrorKind::contract, "weight table size does not match the graph");
    Digraph d;
    d.n = g.node_count();
    d.out.resize(d.n);
    for (int v = 0; v < d.n; ++v)
        for (int u : g.successors(v)) d.out[v].push_back({u, psi[v]});
    return d;
}

}  // namespace etm
