#pragma once

#include "etm/closing.hpp"
#include "etm/ergopt.hpp"

namespace etm {

/// The level-n windows of a periodic word: word[i..i+n) read cyclically.
std::vector<Word> cyclic_windows(const Word& cycle, int level);

struct TpoReport {
    int level = 0;
    double epsilon = 0.0, alpha = 1.0;
    PeriodicOrbit orbit;
    double q_before = 0.0, q_after = 0.0;
    Word cycle_before, cycle_after;  // symbol cycles (primitive, min rotation)
    double margin = 0.0;             // q_after minus the second-best cycle mean
    bool success = false;
    Potential phi_prime;             // the perturbed table, for locking/sweeps
    std::string notes;
};

/// End-to-end perturbation experiment: Q and sub-action of phi, maximizing
/// set, gap-bounded orbit O, penalty phi' = phi - epsilon * d(., O)^alpha
/// (symbolic distance table, zero exactly on O's windows), argmax comparison
/// and uniqueness margin. epsilon <= 0 selects 0.05 * range(phi).
TpoReport tpo_pipeline(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& phi,
                       int level, double epsilon, double alpha, const GapSpec& gap_spec,
                       double tau);

struct LockingResult {
    int successes = 0;
    int count = 0;
};

/// Adds `trials` random smooth-table perturbations, each rescaled so both the
/// sup-norm and the visual Hölder-seminorm estimate are <= rho, and counts
/// how often the argmax cycle survives unchanged. Deterministic per seed.
LockingResult locking_test(const std::shared_ptr<const SubdivisionRule>& rule,
                           const CylinderGraph& g, const Potential& phi_prime, int trials,
                           double rho, unsigned seed);

struct GibbsVector {
    int level = 0;
    double t = 0.0;
    std::vector<double> weights;  // per word, strictly positive, sums to 1
};

/// Finite-level equilibrium state: Perron eigen-data of A(v,w) exp(t psi(v)),
/// computed by log-domain power iteration to 1e-12; node measure is the
/// normalized product of left and right eigenvectors.
GibbsVector equilibrium_state(const CylinderGraph& g, const Potential& psi, double t);

struct SweepPoint {
    double t = 0.0;
    double tv = 0.0;  // total variation against uniform on the orbit windows
};

/// Ground-state sweep over increasing inverse temperatures.
std::vector<SweepPoint> zero_temperature_sweep(const CylinderGraph& g, const Potential& psi,
                                               const std::vector<double>& t_list,
                                               const std::vector<Word>& orbit_windows);

}  // namespace etm
