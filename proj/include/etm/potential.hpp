#pragma once

#include <functional>
#include <string>
#include <vector>

#include "etm/geometry.hpp"

namespace etm {

/// Which distance the Hölder machinery is taken against.
enum class MetricKind { model, visual };

/// A potential on the model sphere: either a callable on model points, or a
/// per-cylinder table at a fixed level (values in lexicographic word order,
/// matching tile ids of refine() and node ids of cylinder_graph()).
struct Potential {
    enum class Kind { closed_form, table };

    Kind kind = Kind::table;
    double alpha = 1.0;  // Hölder exponent in (0, 1]
    int level = 0;       // tables only
    std::function<double(const ModelPoint&)> fn;
    std::vector<double> values;
};

Potential closed_form_potential(std::function<double(const ModelPoint&)> fn, double alpha = 1.0);
Potential table_potential(std::vector<double> values, int level, double alpha = 1.0);
Potential constant_potential(double c);
/// Model coordinate (axis 0 = x, 1 = y), independent of the sheet.
Potential coordinate_potential(int axis);
/// Low-order trigonometric polynomial in the model coordinates, identical on
/// every sheet (hence continuous across the glued face boundary).
Potential random_smooth_potential(unsigned seed);

struct HolderEstimate {
    double alpha = 1.0;
    double seminorm_est = 0.0;  // a lower bound for the true seminorm
    std::string metric;
};

/// Representative points of all level-n cylinders: the realized canonical
/// extension where the address stays on the face planes, otherwise the
/// centroid of the tile polygon on its own sheet. Index order = word order.
std::vector<ModelPoint> cylinder_representatives(const std::shared_ptr<const SubdivisionRule>& rule,
                                                 int n);

/// Level-n table of a closed form, evaluated at the cylinder representatives.
/// A table at its own level passes through unchanged.
Potential discretize(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& p, int n);

/// S_{n_terms} along the shift orbit of w (table: sliding windows of length
/// `level`; closed form: f-iterates of the realized point). S_0 = 0.
double birkhoff_sum(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& p,
                    const Word& w, int n_terms);

/// Sum over one full period of a cyclically admissible word (cyclic windows
/// for tables, the realized periodic orbit for closed forms).
double birkhoff_cycle_sum(const std::shared_ptr<const SubdivisionRule>& rule, const Potential& p,
                          const Word& cycle);

/// Max of |p(w) - p(w')| / d(rep, rep')^alpha over pairs of touching level-n
/// cylinders. Visual metric: touching distinct cylinders sit at distance
/// Lambda^{-n}. Model metric: representative distance, unreachable pairs
/// (different sheets, off the shared boundary) skipped.
HolderEstimate holder_seminorm_estimate(const std::shared_ptr<const SubdivisionRule>& rule,
                                        const Potential& p, double alpha,
                                        MetricKind metric = MetricKind::visual);

struct VariationReport {
    int samples = 0;
    double min = 0, median = 0, max = 0;  // ratios; c_hat = max
    double c_hat = 0;
};

/// Empirical constant for |S_n p(x) - S_n p(y)| <= C d(f^n x, f^n y)^alpha
/// over pairs drawn inside common m-tiles (m >= n).
VariationReport variation_bound_check(const std::shared_ptr<const SubdivisionRule>& rule,
                                      const Potential& p, int n, int m, int samples,
                                      unsigned seed);

/// x -> (min over orbit points of the model distance)^alpha, as a closed form.
Potential distance_potential(const std::shared_ptr<const SubdivisionRule>& rule,
                             std::vector<ModelPoint> orbit, double alpha);

/// Symbolic counterpart on level-n cylinders: (min over the orbit's windows
/// of the word quasi-distance)^alpha, exactly 0 on the windows themselves.
Potential distance_potential_table(const std::vector<CellDecomposition>& tower,
                                   const std::vector<Word>& windows, double alpha);

/// JSON round trip: {"level": n, "alpha": a, "values": {"FA.FB...": v, ...}}
/// with words serialized through the rule's tile names.
void save_table(const SubdivisionRule& rule, const Potential& p, const std::string& path);
Potential load_table(const std::shared_ptr<const SubdivisionRule>& rule, const std::string& path);

}  // namespace etm
