#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace etm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// 2D affine map p -> L p + t with L = [[a,b],[c,d]], t = (e,f).
struct Affine {
    double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

    Vec2 operator()(Vec2 p) const { return {a * p.x + b * p.y + e, c * p.x + d * p.y + f}; }

    Affine then(const Affine& g) const {  // g ∘ this
        return {g.a * a + g.b * c, g.a * b + g.b * d,
                g.c * a + g.d * c, g.c * b + g.d * d,
                g.a * e + g.b * f + g.e,
                g.c * e + g.d * f + g.f};
    }

    static Affine identity() { return {}; }
    static Affine scaling(double s) { return {s, 0, 0, s, 0, 0}; }

    /// Operator 2-norm of the linear part (largest singular value).
    double linear_norm() const {
        double t = a * a + b * b + c * c + d * d;
        double det = a * d - b * c;
        double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det * det));
        return std::sqrt(0.5 * (t + disc));
    }

    double det() const { return a * d - b * c; }

    Affine inverse() const {
        double dt = det();
        Affine r{d / dt, -b / dt, -c / dt, a / dt, 0, 0};
        Vec2 t = r(Vec2{e, f});
        r.e = -t.x;
        r.f = -t.y;
        return r;
    }

    /// Fixed point of a contracting affine map: (I - L)^{-1} t.
    Vec2 fixed_point() const {
        double m00 = 1 - a, m01 = -b, m10 = -c, m11 = 1 - d;
        double dt = m00 * m11 - m01 * m10;
        return {(m11 * e - m01 * f) / dt, (-m10 * e + m00 * f) / dt};
    }
};

/// Affine map sending p0,p1,p2 to q0,q1,q2.
Affine affine_from_triples(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 q0, Vec2 q1, Vec2 q2);

// Convex polygon utilities (all polygons here are convex and counterclockwise
// or clockwise; routines are orientation-agnostic).
double polygon_diameter(const std::vector<Vec2>& poly);
bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly, double tol);
double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
/// Euclidean distance between two convex polygons (0 if they touch or overlap).
double convex_polygon_distance(const std::vector<Vec2>& p, const std::vector<Vec2>& q);
double point_polygon_distance(Vec2 p, const std::vector<Vec2>& poly);

}  // namespace etm
