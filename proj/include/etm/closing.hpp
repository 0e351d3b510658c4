#pragma once

#include "etm/potential.hpp"
#include "etm/symbolic.hpp"

namespace etm {

/// A realized periodic orbit: primitive cycle word on the 1-tile alphabet,
/// one model point per rotation, and the orbit gap (min pairwise distance,
/// +inf for a fixed point).
struct PeriodicOrbit {
    Word word;
    int period = 0;
    std::vector<ModelPoint> points;
    double gap_value = 0.0;
};

struct GapSpec {
    double r = 1.0;
    double theta = 1.0;
};

double gap(const PeriodicOrbit& o);
/// min{r, theta * gap(O)}.
double r_theta_gap(const PeriodicOrbit& o, const GapSpec& spec);

/// Critical points of the map: vertices of D^1 with local degree >= 2.
std::vector<ModelPoint> critical_points(const std::shared_ptr<const SubdivisionRule>& rule);

/// Realize a cyclically admissible word as a periodic orbit (reduced to its
/// primitive period). Verifies numeric periodicity to 1e-8.
PeriodicOrbit periodic_point_from_cycle(const SubdivisionRule& rule, const Word& cycle);

/// Bressaud-Quas search: shortest cycle of the shift graph restricted to
/// nodes whose tiles lie within epsilon of a K tile (0 when touching,
/// same-sheet polygon distance otherwise). Fails unless the period is
/// < (1/epsilon)^kappa.
PeriodicOrbit bq_search(const CylinderGraph& g, const CellDecomposition& dec,
                        const std::vector<int>& k_nodes, double kappa, double epsilon);

struct ShadowReport {
    PeriodicOrbit orbit;
    int repaired = 0;               // trailing symbols replaced to close the word
    std::vector<double> distances;  // d_i = d(f^i x, f^i y), i = 0..l-1
    double beta_hat = 0.0;          // max d_i / (delta * Lambda^{-(l-i)})
    double slope = 0.0;             // least-squares slope of log d_i against l - i
};

/// Local Anosov closing: w carries l pseudo-orbit steps plus trailing context
/// symbols pinning the start point. The length-l word is closed by repairing
/// at most its last few symbols (maximal prefix kept), realized, and the
/// shadow distances are reported against the decay envelope.
ShadowReport local_anosov_close(const std::shared_ptr<const SubdivisionRule>& rule, const Word& w,
                                int l, double delta, double eta);

struct GapBoundReport {
    PeriodicOrbit orbit;
    std::vector<int> periods;  // recursion trace
    double lhs = 0.0;          // sum over orbit points of d(x, K)^alpha
    double rhs = 0.0;          // tau * r_theta_gap^alpha
};

/// Recursive gap-bounded construction: start from bq_search, then repeatedly
/// close the pseudo-orbit between the closest orbit pair (at least halving
/// the period) until sum d(x,K)^alpha <= tau * gap^alpha. Errors with the
/// period trace after log2(p0) + 2 steps.
GapBoundReport bound_by_gap(const CylinderGraph& g, const CellDecomposition& dec,
                            const std::vector<int>& k_nodes, const GapSpec& spec, double alpha,
                            double tau, double kappa = 2.0, double eta = 1e-3);

struct ExpansionReport {
    int samples = 0;
    double min_ratio = 0.0, max_ratio = 0.0;  // d(f^n x, f^n y) / d(x, y)
    double c2_hat = 0.0;                      // tightest two-sided constant vs Lambda^n
};

/// Empirical two-sided expansion constant over pairs whose n-step orbits stay
/// eta away from every critical point.
ExpansionReport uniform_expansion_check(const std::shared_ptr<const SubdivisionRule>& rule,
                                        int samples, double eta, int n, unsigned seed);

}  // namespace etm
