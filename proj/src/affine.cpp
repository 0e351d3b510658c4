#include "etm/affine.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace etm {

Affine affine_from_triples(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 q0, Vec2 q1, Vec2 q2) {
    // Solve L (p1-p0) = q1-q0, L (p2-p0) = q2-q0, then t = q0 - L p0.
    Vec2 u = p1 - p0, v = p2 - p0;
    double dt = cross(u, v);
    if (dt == 0.0) throw std::invalid_argument("affine_from_triples: degenerate source triple");
    Vec2 a = q1 - q0, b = q2 - q0;
    // L = [a b] * [u v]^{-1}
    double ia = v.y / dt, ib = -v.x / dt, ic = -u.y / dt, id = u.x / dt;
    Affine r;
    r.a = a.x * ia + b.x * ic;
    r.b = a.x * ib + b.x * id;
    r.c = a.y * ia + b.y * ic;
    r.d = a.y * ib + b.y * id;
    Vec2 lp0{r.a * p0.x + r.b * p0.y, r.c * p0.x + r.d * p0.y};
    r.e = q0.x - lp0.x;
    r.f = q0.y - lp0.y;
    return r;
}

double polygon_diameter(const std::vector<Vec2>& poly) {
    double m = 0;
    for (size_t i = 0; i < poly.size(); ++i)
        for (size_t j = i + 1; j < poly.size(); ++j) m = std::max(m, dist(poly[i], poly[j]));
    return m;
}

bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly, double tol) {
    // Signs of cross products must all agree (up to tol) with the polygon's
    // own orientation.
    const size_t n = poly.size();
    double pos = -std::numeric_limits<double>::infinity();
    double neg = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % n];
        double c = cross(b - a, p - a);
        pos = std::max(pos, c);
        neg = std::min(neg, c);
    }
    double orient = 0;
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % n], c = poly[(i + 2) % n];
        orient += cross(b - a, c - b);
    }
    if (orient >= 0) return neg >= -tol;
    return pos <= tol;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double l2 = dot(ab, ab);
    if (l2 == 0.0) return dist(p, a);
    double t = std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
    return dist(p, a + ab * t);
}

static bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
    int d1 = sgn(cross(b - a, c - a)), d2 = sgn(cross(b - a, d - a));
    int d3 = sgn(cross(d - c, a - c)), d4 = sgn(cross(d - c, b - c));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    return false;
}

double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                    std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

double point_polygon_distance(Vec2 p, const std::vector<Vec2>& poly) {
    if (point_in_convex_polygon(p, poly, 0.0)) return 0.0;
    double m = std::numeric_limits<double>::infinity();
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) m = std::min(m, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    return m;
}

double convex_polygon_distance(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
    for (auto& v : p)
        if (point_in_convex_polygon(v, q, 0.0)) return 0.0;
    for (auto& v : q)
        if (point_in_convex_polygon(v, p, 0.0)) return 0.0;
    double m = std::numeric_limits<double>::infinity();
    const size_t np = p.size(), nq = q.size();
    for (size_t i = 0; i < np; ++i)
        for (size_t j = 0; j < nq; ++j)
            m = std::min(m, segment_distance(p[i], p[(i + 1) % np], q[j], q[(j + 1) % nq]));
    return m;
}

}  // namespace etm
