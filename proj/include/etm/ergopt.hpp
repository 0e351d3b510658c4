#pragma once

#include <optional>

#include "etm/meancycle.hpp"
#include "etm/potential.hpp"

namespace etm {

/// Value function on level-n cylinders for the max-plus operator.
struct BouschState {
    int level = 0;
    std::vector<double> u;
    double residual = 0.0;  // sup-norm of the last update / fixed-point defect
};

/// One max-plus step: new(w) = max over shift-predecessors v of
/// (psi(v) + u(v)) - subtract_q. Satisfies L(u + c) = L(u) + c exactly.
BouschState bousch_apply(const CylinderGraph& g, const BouschState& u, const Potential& psi,
                         std::optional<double> subtract_q = std::nullopt);

/// Maximum mean cycle of the node-weighted shift graph (Q_n of psi).
MaxMeanResult q_value(const CylinderGraph& g, const Potential& psi,
                      MeanCycleMethod method = MeanCycleMethod::automatic);

/// Calibrated sub-action: running coordinatewise supremum of the iterates
/// L_{psi-q}^k(0) after burn-in, until bousch_apply(u) = u within tol.
/// Throws Error{numeric} with the last residual on non-convergence.
BouschState calibrated_subaction(const CylinderGraph& g, const Potential& psi, double q,
                                 int max_iters = 100000, double tol = 1e-10);

/// Mane normalization psi - q + u - u
/// o shift. Arc values are all <= tol (error otherwise); the returned table
/// is the node projection (max over outgoing arcs), so it is <= tol
/// everywhere with maximum mean cycle 0.
Potential mane_normalize(const CylinderGraph& g, const Potential& psi, const BouschState& u,
                         double q, double tol = 1e-10);

/// Approximate maximizing set K: nodes with phi_tilde >= -tol, pruned until
/// every survivor keeps a successor and a predecessor inside the set.
/// Throws Error{numeric} when the result empties out.
std::vector<int> maximizing_set(const CylinderGraph& g, const Potential& phi_tilde, double tol);

struct LivsicVerdict {
    bool coboundary_like = false;
    double q_plus = 0.0;        // q_value(psi)
    double q_minus = 0.0;       // q_value(-psi)
    double max_cycle_sum = 0.0; // max |sum| over simple cycles up to max_period
    int cycles_checked = 0;
};

/// Bilateral Mane criterion: coboundary-like iff |Q(psi)| and |Q(-psi)| are
/// both <= tol; reports the largest simple-cycle sum up to max_period.
LivsicVerdict livsic_test(const CylinderGraph& g, const Potential& psi, int max_period,
                          double tol = 1e-10);

}  // namespace etm
