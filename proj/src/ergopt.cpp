#include "etm/ergopt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace etm {

namespace {

void check_level(const CylinderGraph& g, const Potential& psi, const char* who) {
    if (psi.kind != Potential::Kind::table)
        fail(ErrorKind::contract, std::string(who) + " needs a table potential");
    if (psi.level != g.level) fail(ErrorKind::contract, std::string(who) + ": level mismatch");
    if (static_cast<int>(psi.values.size()) != g.node_count())
        fail(ErrorKind::contract, std::string(who) + ": table size mismatch");
}

std::vector<std::vector<int>> predecessor_lists(const CylinderGraph& g) {
    std::vector<std::vector<int>> pred(g.node_count());
    for (int v = 0; v < g.node_count(); ++v)
        for (int s : g.successors(v)) pred[s].push_back(v);
    return pred;
}

std::vector<double> apply_once(const std::vector<std::vector<int>>& pred,
                               const std::vector<double>& u, const std::vector<double>& psi,
                               double q) {
    std::vector<double> out(u.size());
    for (size_t w = 0; w < u.size(); ++w) {
        double best = -std::numeric_limits<double>::infinity();
        for (int v : pred[w]) best = std::max(best, psi[v] + u[v]);
        out[w] = best - q;
    }
    return out;
}

}  // namespace

BouschState bousch_apply(const CylinderGraph& g, const BouschState& u, const Potential& psi,
                         std::optional<double> subtract_q) {
    check_level(g, psi, "bousch_apply");
    if (u.level != g.level || static_cast<int>(u.u.size()) != g.node_count())
        fail(ErrorKind::contract, "bousch_apply: state level mismatch");
    auto pred = predecessor_lists(g);
    BouschState out;
    out.level = g.level;
    out.u = apply_once(pred, u.u, psi.values, subtract_q.value_or(0.0));
    double r = 0;
    for (size_t i = 0; i < out.u.size(); ++i) r = std::max(r, std::abs(out.u[i] - u.u[i]));
    out.residual = r;
    return out;
}

MaxMeanResult q_value(const CylinderGraph& g, const Potential& psi, MeanCycleMethod method) {
    check_level(g, psi, "q_value");
    return max_mean_cycle(node_weighted_digraph(g, psi.values), method);
}

BouschState calibrated_subaction(const CylinderGraph& g, const Potential& psi, double q,
                                 int max_iters, double tol) {
    check_level(g, psi, "calibrated_subaction");
    auto pred = predecessor_lists(g);
    const int n = g.node_count();
    const int burn = 4 * g.level;

    std::vector<double> v(n, 0.0);
    for (int k = 0; k < burn; ++k) v = apply_once(pred, v, psi.values, q);

    // Running supremum of the tail iterates. The iterates are eventually
    // periodic, so once the window [reset, now] enters the periodic regime
    // and covers a full period, sup is an exact fixed point of the operator.
    std::vector<double> U = v;
    double resid = std::numeric_limits<double>::infinity();
    int since_reset = 0;
    int window = std::max(2 * burn, 64);
    for (int it = burn; it < max_iters; ++it) {
        v = apply_once(pred, v, psi.values, q);
        for (int i = 0; i < n; ++i) U[i] = std::max(U[i], v[i]);
        std::vector<double> LU = apply_once(pred, U, psi.values, q);
        resid = 0;
        for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(LU[i] - U[i]));
        if (resid <= tol) {
            BouschState out;
            out.level = g.level;
            out.u = std::move(U);
            out.residual = resid;
            return out;
        }
        if (++since_reset >= window) {  // still in the transient: move the burn-in forward
            U = v;
            since_reset = 0;
            window *= 2;
        }
    }
    fail(ErrorKind::numeric,
         "calibrated_subaction did not converge; last residual " + std::to_string(resid));
}

Potential mane_normalize(const CylinderGraph& g, const Potential& psi, const BouschState& u,
                         double q, double tol) {
    check_level(g, psi, "mane_normalize");
    if (u.level != g.level || static_cast<int>(u.u.size()) != g.node_count())
        fail(ErrorKind::contract, "mane_normalize: sub-action level mismatch");
    const int n = g.node_count();
    std::vector<double> node(n, -std::numeric_limits<double>::infinity());
    for (int v = 0; v < n; ++v) {
        for (int w : g.successors(v)) {
            double arc = psi.values[v] - q + u.u[v] - u.u[w];
            if (arc > tol)
                fail(ErrorKind::numeric,
                     "normalized potential is positive (" + std::to_string(arc) +
                         "); the sub-action or q is not calibrated");
            node[v] = std::max(node[v], arc);
        }
    }
    return table_potential(std::move(node), g.level, psi.alpha);
}

std::vector<int> maximizing_set(const CylinderGraph& g, const Potential& phi_tilde, double tol) {
    check_level(g, phi_tilde, "maximizing_set");
    const int n = g.node_count();
    std::vector<char> in(n, 0);
    for (int v = 0; v < n; ++v) in[v] = phi_tilde.values[v] >= -tol;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            if (!in[v]) continue;
            bool succ = false, prec = false;
            for (int s : g.successors(v)) succ = succ || in[s];
            for (int p : g.predecessors(v)) prec = prec || in[p];
            if (!succ || !prec) {
                in[v] = 0;
                changed = true;
            }
        }
    }
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (in[v]) out.push_back(v);
    if (out.empty()) fail(ErrorKind::numeric, "maximizing set pruned to nothing; raise tol");
    return out;
}

LivsicVerdict livsic_test(const CylinderGraph& g, const Potential& psi, int max_period,
                          double tol) {
    check_level(g, psi, "livsic_test");
    if (max_period < 1 || max_period > 10)
        fail(ErrorKind::contract, "max_period must lie in 1..10");
    LivsicVerdict verdict;
    verdict.q_plus = q_value(g, psi).q;
    Potential neg = psi;
    for (double& x : neg.values) x = -x;
    verdict.q_minus = q_value(g, neg).q;
    verdict.coboundary_like = std::abs(verdict.q_plus) <= tol && std::abs(verdict.q_minus) <= tol;

    // simple cycles up to max_period, smallest node first to avoid duplicates
    const int n = g.node_count();
    std::vector<char> on_path(n, 0);
    std::vector<int> path;
    double sum = 0;
    int start = 0;
    std::function<void()> dfs = [&]() {
        int v = path.back();
        for (int s : g.successors(v)) {
            if (s == start) {
                verdict.max_cycle_sum = std::max(verdict.max_cycle_sum, std::abs(sum + psi.values[v]));
                ++verdict.cycles_checked;
                continue;
            }
            if (s < start || on_path[s]) continue;
            if (static_cast<int>(path.size()) >= max_period) continue;
            on_path[s] = 1;
            path.push_back(s);
            sum += psi.values[v];
            dfs();
            sum -= psi.values[v];
            path.pop_back();
            on_path[s] = 0;
        }
    };
    for (start = 0; start < n; ++start) {
        on_path[start] = 1;
        path.assign(1, start);
        sum = 0;
        dfs();
        on_path[start] = 0;
    }
    return verdict;
}

}  // namespace etm
