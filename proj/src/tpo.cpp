#include "etm/tpo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace etm {

namespace {

Word cycle_symbols(const CylinderGraph& g, const std::vector<int>& node_cycle) {
    Word w;
    for (int v : node_cycle) w.push_back(g.symbol(v, 0));
    return w;
}

Word canonical_cycle(const Word& w) {
    int p = primitive_period(w);
    return min_rotation(Word(w.begin(), w.begin() + p));
}

/// Max mean cycle over a possibly disconnected graph: best over the strongly
/// connected pieces that contain at least one arc.
double max_mean_any(const Digraph& g) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& comp : strongly_connected_components(g)) {
        std::vector<int> local(g.n, -1);
        for (size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<int>(i);
        Digraph sub;
        sub.n = static_cast<int>(comp.size());
        sub.out.resize(sub.n);
        bool arcs = false;
        for (int v : comp)
            for (const auto& a : g.out[v])
                if (local[a.to] >= 0) {
                    sub.out[local[v]].push_back({local[a.to], a.w});
                    arcs = true;
                }
        if (!arcs) continue;
        best = std::max(best, max_mean_cycle(sub).q);
    }
    return best;
}

/// Best cycle mean among cycles distinct from `best_cycle`: every other
/// simple cycle avoids at least one of its arcs, so forbid them one at a time.
double second_best_mean(const Digraph& g, const std::vector<int>& best_cycle) {
    double best = -std::numeric_limits<double>::infinity();
    const int len = static_cast<int>(best_cycle.size());
    for (int i = 0; i < len; ++i) {
        int u = best_cycle[i], v = best_cycle[(i + 1) % len];
        Digraph pruned = g;
        auto& arcs = pruned.out[u];
        for (size_t j = 0; j < arcs.size(); ++j)
            if (arcs[j].to == v) {
                arcs.erase(arcs.begin() + j);
                break;
            }
        best = std::max(best, max_mean_any(pruned));
    }
    return best;
}

}  // namespace

std::vector<Word> cyclic_windows(const Word& cycle, int level) {
    if (cycle.empty() || level < 1) fail(ErrorKind::contract, "empty cycle or bad level");
    std::vector<Word> out;
    const int p = static_cast<int>(cycle.size());
    for (int i = 0; i < p; ++i) {
        Word w(level);
        for (int t = 0; t < level; ++t) w[t] = cycle[(i + t) % p];
        out.push_back(std::move(w));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

TpoReport tpo_pipeline(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& phi,
                       int level, double epsilon, double alpha, const GapSpec& gap_spec,
                       double tau) {
    if (level < 3) fail(ErrorKind::contract, "tpo_pipeline needs level >= 3");
    auto tower = refine_tower(rule, level);
    CylinderGraph g = cylinder_graph(rule, level);

    TpoReport rep;
    rep.level = level;
    rep.alpha = alpha;
    Potential psi = discretize(rule, phi, level);
    if (epsilon <= 0) {
        auto [lo, hi] = std::minmax_element(psi.values.begin(), psi.values.end());
        epsilon = 0.05 * (*hi - *lo);
        if (epsilon <= 0) epsilon = 0.05;  // constant potential: any scale works
        rep.notes += "epsilon defaulted to 0.05*range; ";
    }
    rep.epsilon = epsilon;

    auto before = q_value(g, psi);
    rep.q_before = before.q;
    rep.cycle_before = canonical_cycle(cycle_symbols(g, before.cycle));

    BouschState sub = calibrated_subaction(g, psi, before.q);
    Potential tilde = mane_normalize(g, psi, sub, before.q);
    auto K = maximizing_set(g, tilde, 1e-9);
    GapBoundReport gb = bound_by_gap(g, tower[level], K, gap_spec, alpha, tau);
    rep.orbit = gb.orbit;

    Potential penalty = distance_potential_table(tower, cyclic_windows(rep.orbit.word, level), alpha);
    rep.phi_prime = psi;
    rep.phi_prime.alpha = alpha;
    for (size_t i = 0; i < psi.values.size(); ++i)
        rep.phi_prime.values[i] = psi.values[i] - epsilon * penalty.values[i];

    Digraph dg = node_weighted_digraph(g, rep.phi_prime.values);
    auto after = max_mean_cycle(dg);
    rep.q_after = after.q;
    rep.cycle_after = canonical_cycle(cycle_symbols(g, after.cycle));
    rep.margin = after.q - second_best_mean(dg, after.cycle);
    rep.success = rep.margin > 0 && rep.cycle_after == canonical_cycle(rep.orbit.word);
    if (!rep.success) rep.notes += "argmax cycle differs from O or margin nonpositive; ";
    return rep;
}

LockingResult locking_test(const std::shared_ptr<const SubdivisionRule>& rule,
                           const CylinderGraph& g, const Potential& phi_prime, int trials,
                           double rho, unsigned seed) {
    if (rho < 0 || trials < 1) fail(ErrorKind::contract, "need rho >= 0 and trials >= 1");
    Word base = canonical_cycle(cycle_symbols(g, q_value(g, phi_prime).cycle));
    LockingResult res;
    res.count = trials;
    std::mt19937 master(seed);
    for (int trial = 0; trial < trials; ++trial) {
        unsigned ts = static_cast<unsigned>(master());
        Potential pert = discretize(rule, random_smooth_potential(ts), g.level);
        double sup = 0;
        for (double v : pert.values) sup = std::max(sup, std::abs(v));
        double est = holder_seminorm_estimate(rule, pert, phi_prime.alpha).seminorm_est;
        double denom = std::max(sup, est);
        double scale = denom > 0 ? rho / denom : 0.0;
        Potential bumped = phi_prime;
        for (size_t i = 0; i < bumped.values.size(); ++i)
            bumped.values[i] += scale * pert.values[i];
        Word got = canonical_cycle(cycle_symbols(g, q_value(g, bumped).cycle));
        if (got == base) ++res.successes;
    }
    return res;
}

GibbsVector equilibrium_state(const CylinderGraph& g, const Potential& psi, double t) {
    if (!std::isfinite(t)) fail(ErrorKind::contract, "t must be finite");
    if (psi.kind != Potential::Kind::table || psi.level != g.level)
        fail(ErrorKind::contract, "equilibrium_state needs a table at the graph level");
    const int n = g.node_count();
    std::vector<std::vector<int>> succ(n), pred(n);
    for (int v = 0; v < n; ++v) {
        succ[v] = g.successors(v);
        for (int s : succ[v]) pred[s].push_back(v);
    }
    if (strongly_connected_components(node_weighted_digraph(g, psi.values)).size() != 1)
        fail(ErrorKind::validation, "equilibrium_state needs a strongly connected graph");

    auto logsumexp = [](const std::vector<double>& xs) {
        double m = *std::max_element(xs.begin(), xs.end());
        double s = 0;
        for (double x : xs) s += std::exp(x - m);
        return m + std::log(s);
    };
    // log-domain power iteration on the shifted kernel M + c*I, where arc
    // v->w of M carries weight exp(t*psi(v)). The shift keeps the Perron
    // eigenvectors and breaks modulus ties with rotated eigenvalues (the
    // kernel is nearly a cycle permutation at large t, so unshifted power
    // iteration would oscillate instead of converging).
    // log(lambda_1) = t*q + O(log n), so this shift stays within a bounded
    // factor of the Perron eigenvalue at every t
    const double logc = t * max_mean_cycle(node_weighted_digraph(g, psi.values)).q;
    auto iterate = [&](std::vector<double>& vec, bool right) {
        std::vector<double> nxt(n), terms;
        for (int v = 0; v < n; ++v) {
            terms.clear();
            if (right) {
                for (int w : succ[v]) terms.push_back(vec[w]);
                nxt[v] = t * psi.values[v] + logsumexp(terms);
            } else {
                for (int u : pred[v]) terms.push_back(vec[u] + t * psi.values[u]);
                nxt[v] = logsumexp(terms);
            }
            nxt[v] = logsumexp({nxt[v], logc + vec[v]});
        }
        double shift = nxt[0] - vec[0];
        double osc = 0;
        for (int v = 0; v < n; ++v) osc = std::max(osc, std::abs(nxt[v] - vec[v] - shift));
        for (int v = 0; v < n; ++v) vec[v] = nxt[v] - nxt[0];  // pin coordinate 0
        return osc;
    };

    std::vector<double> logr(n, 0.0), logl(n, 0.0);
    const int max_iters = 200000;
    // tolerance relative to the spread of the log iterates: at large t the
    // entries span O(t * osc(psi)) and the rounding floor scales with them
    auto spread = [&]() {
        double m = 1.0;
        for (double x : logr) m = std::max(m, std::abs(x));
        for (double x : logl) m = std::max(m, std::abs(x));
        return m;
    };
    double osc_r = 1, osc_l = 1, tol = 1e-13;
    for (int it = 0; it < max_iters && (osc_r > tol || osc_l > tol); ++it) {
        osc_r = iterate(logr, true);
        osc_l = iterate(logl, false);
        tol = 1e-13 * spread();
    }
    if (osc_r > 10 * tol || osc_l > 10 * tol)
        fail(ErrorKind::numeric, "equilibrium power iteration stalled; residual " +
                                     std::to_string(std::max(osc_r, osc_l)));

    GibbsVector out;
    out.level = g.level;
    out.t = t;
    out.weights.resize(n);
    double m = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < n; ++v) m = std::max(m, logl[v] + logr[v]);
    double total = 0;
    for (int v = 0; v < n; ++v) {
        out.weights[v] = std::exp(logl[v] + logr[v] - m);
        total += out.weights[v];
    }
    for (double& w : out.weights) w /= total;
    return out;
}

std::vector<SweepPoint> zero_temperature_sweep(const CylinderGraph& g, const Potential& psi,
                                               const std::vector<double>& t_list,
                                               const std::vector<Word>& orbit_windows) {
    if (orbit_windows.empty()) fail(ErrorKind::contract, "empty orbit window set");
    for (size_t i = 1; i < t_list.size(); ++i)
        if (t_list[i] <= t_list[i - 1]) fail(ErrorKind::contract, "t_list must increase");
    std::vector<double> target(g.node_count(), 0.0);
    for (const Word& w : orbit_windows) {
        int idx = g.index_of(w);
        if (idx < 0) fail(ErrorKind::contract, "orbit window is not a graph node");
        target[idx] = 1.0 / static_cast<double>(orbit_windows.size());
    }
    std::vector<SweepPoint> out;
    for (double t : t_list) {
        GibbsVector mu = equilibrium_state(g, psi, t);
        double tv = 0;
        for (int v = 0; v < g.node_count(); ++v) tv += std::abs(mu.weights[v] - target[v]);
        out.push_back({t, 0.5 * tv});
    }
    return out;
}

}  // namespace etm
