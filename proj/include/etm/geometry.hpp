#pragma once

#include <complex>
#include <vector>

#include "etm/complex.hpp"

namespace etm {

struct VisualMetricConfig {
    double lambda = 2.0;
    int max_level = 8;  // depth cap for the bouquet search
};

/// Combinatorial visual quasi-distance Lambda^{-m}, m = largest level with
/// y in the bouquet U^m(x) (capped by cfg.max_level and the tower height).
double visual_distance(const std::vector<CellDecomposition>& tower, const ModelPoint& x,
                       const ModelPoint& y, const VisualMetricConfig& cfg);

/// Do two tiles of one decomposition intersect (equivalently: share a vertex)?
bool tiles_touch(const CellDecomposition& d, int t1, int t2);

/// chart_{w_0} o chart_{w_1} o ... : the affine frame of the cylinder of w
/// (maps the model polygon onto the |w|-tile, on the sheet of w_0's face).
Affine compose_charts(const SubdivisionRule& rule, const Word& w);

/// Quasi-distance between the cylinders of two words: Lambda^{-m} with m the
/// deepest level at which the prefix tiles still touch. A one-sided selection
/// of the visual distance (prefix tiles only), consistent across callers.
double word_quasi_distance(const std::vector<CellDecomposition>& tower, const Word& a,
                           const Word& b, double lambda);

/// A point of the Riemann sphere: z when finite, or the point at infinity.
struct SpherePoint {
    std::complex<double> z;
    bool inf = false;
    static SpherePoint infinity() { return {{}, true}; }
};

/// sigma(z,w) = 2|z-w| / (sqrt(1+|z|^2) sqrt(1+|w|^2)), sigma(inf,w) = 2/sqrt(1+|w|^2).
double chordal_distance(const SpherePoint& z, const SpherePoint& w);

/// The degree-4 rational map g(z) = 4 z (1 - z^2) / (1 + z^2)^2, evaluated
/// projectively so poles and infinity are exact.
SpherePoint lattes_eval(const SpherePoint& z);

/// Eventually periodic address: prefix followed by the repeating cycle.
struct EventuallyPeriodicWord {
    Word prefix;
    Word cycle;  // nonempty, cyclically admissible
};

/// Deterministic extension of a finite word: close it immediately if the
/// last->first transition is admissible, otherwise follow the lexicographically
/// least admissible symbol until the greedy walk cycles.
EventuallyPeriodicWord canonical_extension(const SubdivisionRule& rule, const Word& w);

/// The unique point in the intersection of the cylinders of an eventually
/// periodic admissible word (chart composition fixed point; exact).
/// Requires every symbol to live on a face plane (no pocket symbols).
ModelPoint address_to_point(const SubdivisionRule& rule, const EventuallyPeriodicWord& w);
ModelPoint address_to_point(const SubdivisionRule& rule, const Word& w);

/// Address of a level-n tile containing x; boundary ties resolve to the
/// least tile id at each descent step.
Word point_to_address(const SubdivisionRule& rule, const ModelPoint& x, int n);

/// One application of the map: x in 1-tile Y goes to chart_Y^{-1}(x) on the
/// image face. Boundary ties resolve to the least tile id.
ModelPoint map_point(const SubdivisionRule& rule, const ModelPoint& x);

/// Distance in the piecewise-flat model: Euclidean within a sheet; points on
/// the face boundary are shared between the two face planes. +inf otherwise.
double model_distance(const SubdivisionRule& rule, const ModelPoint& x, const ModelPoint& y);

/// Like model_distance, but finite across the two glued face planes: the
/// shortest broken path through a sampled seam point. Pocket sheets stay at
/// +inf (reachable combinatorially only).
double glued_distance(const SubdivisionRule& rule, const ModelPoint& x, const ModelPoint& y);

struct SampleReport {
    int samples = 0;
    double min = 0, median = 0, max = 0;
    double c0 = 0;  // empirical two-sided constant
    Word worst;     // witness (where meaningful)
};

/// max over sampled words of model_distance(pi(shift w), f(pi(w))).
SampleReport factor_commutation_check(const SubdivisionRule& rule, int samples, int n,
                                      unsigned seed);

/// Ratios d(f^n x, f^n y) / (Lambda^n d(x,y)) for pairs inside common
/// (n+k)-tiles; c0 = max(max_ratio, 1/min_ratio).
SampleReport metric_distortion_check(const SubdivisionRule& rule, int samples, int k, int n,
                                     unsigned seed);

}  // namespace etm
