#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bloch2d/lattice.hpp"

namespace bloch2d {

/// Raised when an operation needs a Bloch period but the force carries no
/// commensurate (q,r) declaration; see rationalize_force.
struct IncommensurateForceError : std::runtime_error {
    IncommensurateForceError()
        : std::runtime_error(
              "force has no commensurate (q,r) direction declared; "
              "use rationalize_force to obtain one (with its residual)") {}
};

/// Bloch period T from F T = 2*pi*(q,r): T = 2*pi*q/F1 (or 2*pi*r/F2 when
/// q = 0). Always positive thanks to the ForceSpec sign canonicalization.
inline double bloch_period(const ForceSpec& F) {
    if (!F.qr) throw IncommensurateForceError{};
    const auto [q, r] = *F.qr;
    if (F.F1 == 0.0 && F.F2 == 0.0)
        throw std::invalid_argument("bloch_period: zero force");
    return (q != 0) ? two_pi * q / F.F1 : two_pi * r / F.F2;
}

/// Exact closed-form centre-of-mass displacement r(t) - r(0) under a static
/// force: sum over stored offsets of m J_m I_m(t) with the per-term time
/// integral
///   I_m(t) = t sin(k0.m)                              if F.m = 0,
///   I_m(t) = [cos(k0.m) - cos(k0.m + F.m t)] / (F.m)  otherwise.
inline Vec2 closed_form_displacement(const HoppingSet& J, const WaveVector& k0,
                                     const ForceSpec& F, double t) {
    Vec2 r;
    for (const auto& [m, Jm] : J.entries()) {
        const double km = dot(k0, m);
        const double fm = F.F1 * m.m1 + F.F2 * m.m2;
        const double I = (fm == 0.0)
                             ? t * std::sin(km)
                             : (std::cos(km) - std::cos(km + fm * t)) / fm;
        r.x += m.m1 * Jm * I;
        r.y += m.m2 * Jm * I;
    }
    return r;
}

/// Net displacement per Bloch period and the offsets that produce it.
struct DriftResult {
    double period = 0.0;             // T, units 1/E_r
    Vec2 displacement;               // D_T, sites
    Vec2 velocity;                   // D_T / T
    std::vector<Offset> contributing;  // offsets with q*m1 + r*m2 = 0
};

/// D_T = T sum_m m J_m sin(m.k0) over offsets perpendicular to F. The
/// selector is the exact integer condition q*m1 + r*m2 = 0, never a
/// floating-point test. All contributing offsets are integer multiples of
/// one primitive direction p, so D_T is evaluated as (scalar) * p; this
/// keeps F.D_T = 0 exact whenever F.p evaluates to zero.
inline DriftResult drift_vector(const HoppingSet& J, const WaveVector& k0,
                                const ForceSpec& F) {
    if (!F.qr) throw IncommensurateForceError{};
    const auto [q, r] = *F.qr;
    DriftResult out;
    out.period = bloch_period(F);
    // primitive lattice direction perpendicular to (q,r)
    const int g = std::gcd(std::abs(q), std::abs(r));
    const Offset p{r / g, -q / g};
    double amplitude = 0.0;  // sum of J_m t_m sin(m.k0) with m = t_m * p
    for (const auto& [m, Jm] : J.entries()) {
        if (q * m.m1 + r * m.m2 != 0) continue;
        out.contributing.push_back(m);
        const int t_m = (p.m1 != 0) ? m.m1 / p.m1 : m.m2 / p.m2;
        amplitude += Jm * t_m * std::sin(dot(k0, m));
    }
    out.displacement = {out.period * amplitude * p.m1, out.period * amplitude * p.m2};
    out.velocity = {amplitude * p.m1, amplitude * p.m2};
    return out;
}

/// Best coprime direction (q,r) with |q|,|r| <= q_max for a raw force,
/// minimizing the cross residual |F1 r - F2 q| / |F| (exhaustive search).
/// The residual is recorded in the returned spec; a large residual means the
/// associated period exceeds any practical observation span rather than
/// being an error.
inline ForceSpec rationalize_force(Vec2 F, int q_max) {
    if (F.x == 0.0 && F.y == 0.0)
        throw std::invalid_argument("rationalize_force: zero force");
    if (q_max < 1) throw std::invalid_argument("rationalize_force: q_max must be >= 1");
    const double Fn = norm(F);
    int best_q = 0, best_r = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int q = 0; q <= q_max; ++q) {
        for (int r = -q_max; r <= q_max; ++r) {
            if (q == 0 && r <= 0) continue;  // (0,r>0) covers the F1=0 axis
            if (std::gcd(q, std::abs(r)) != 1) continue;
            const double res = std::abs(F.x * r - F.y * q) / Fn;
            if (res < best) {
                best = res;
                best_q = q;
                best_r = r;
            }
        }
    }
    if (best_q * F.x + best_r * F.y < 0.0) { best_q = -best_q; best_r = -best_r; }
    ForceSpec spec;
    spec.F1 = F.x;
    spec.F2 = F.y;
    spec.qr = {best_q, best_r};
    spec.qr_residual = best;
    return spec;
}

struct SemiclassicalSample {
    double t = 0.0;   // units 1/E_r
    WaveVector k;     // canonicalized k0 + F t
    Vec2 r;           // displacement from r(0), sites
};

/// Sample the closed-form trajectory at uniform times. No ODE integration is
/// involved: for a static force both k(t) and r(t) are exact.
inline std::vector<SemiclassicalSample> semiclassical_trajectory(
    const HoppingSet& J, const WaveVector& k0, const ForceSpec& F,
    double t_end, double dt_sample) {
    if (dt_sample <= 0.0)
        throw std::invalid_argument("semiclassical_trajectory: dt_sample must be > 0");
    std::vector<SemiclassicalSample> samples;
    const int n = static_cast<int>(std::floor(t_end / dt_sample + 1e-9));
    samples.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = i * dt_sample;
        SemiclassicalSample s;
        s.t = t;
        s.k = canonicalize({k0.k1 + F.F1 * t, k0.k2 + F.F2 * t});
        s.r = closed_form_displacement(J, k0, F, t);
        samples.push_back(s);
    }
    return samples;
}

}  // namespace bloch2d
