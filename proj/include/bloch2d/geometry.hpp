#pragma once

#include <cmath>
#include <compare>

namespace bloch2d {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Plain 2-vector for real-space displacements, velocities and forces.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Integer lattice offset (site label difference).
struct Offset {
    int m1 = 0;
    int m2 = 0;

    Offset negated() const { return {-m1, -m2}; }
    auto operator<=>(const Offset&) const = default;
};

/// Wave vector in the reduced (integer-site) picture. Components are
/// interpreted modulo 2*pi; the Brillouin zone is [-pi,pi) x [-pi,pi).
struct WaveVector {
    double k1 = 0.0;
    double k2 = 0.0;
};

/// Wrap one component into [-pi, pi). std::remainder rounds half to even,
/// which makes the map idempotent; the half-open convention folds +pi to -pi.
inline double wrap_to_bz(double k) {
    double w = std::remainder(k, two_pi);
    if (w >= pi) w -= two_pi;
    return w;
}

inline WaveVector canonicalize(const WaveVector& k) {
    return {wrap_to_bz(k.k1), wrap_to_bz(k.k2)};
}

inline double dot(const WaveVector& k, const Offset& m) {
    return k.k1 * m.m1 + k.k2 * m.m2;
}

inline double dot(const Vec2& F, const Offset& m) {
    return F.x * m.m1 + F.y * m.m2;
}

}  // namespace bloch2d
