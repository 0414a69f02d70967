#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bloch2d/geometry.hpp"

namespace bloch2d {

/// Single-band tight-binding model on the integer-labelled lattice: a map
/// from site offset m to the real hopping amplitude J_m (units of E_r).
/// Both m and -m are always stored, with equal values, so that the
/// dispersion is a plain cosine series. The on-site (0,0) term is excluded;
/// it only shifts the band by a constant.
class HoppingSet {
public:
    HoppingSet() = default;

    /// Store J for both m and -m.
    void set_pair(Offset m, double J) {
        if (m.m1 == 0 && m.m2 == 0)
            throw std::invalid_argument("HoppingSet: offset (0,0) is excluded");
        entries_[m] = J;
        entries_[m.negated()] = J;
    }

    /// Build from raw rows (as read from a table); enforces the m/-m symmetry.
    static HoppingSet from_rows(const std::vector<std::pair<Offset, double>>& rows,
                                double tol = 0.0) {
        std::map<Offset, double> raw;
        for (const auto& [m, J] : rows) {
            if (m.m1 == 0 && m.m2 == 0)
                throw std::invalid_argument("HoppingSet: offset (0,0) is excluded");
            if (raw.count(m))
                throw std::invalid_argument("HoppingSet: duplicate offset in input");
            raw[m] = J;
        }
        HoppingSet J;
        for (const auto& [m, v] : raw) {
            auto it = raw.find(m.negated());
            if (it == raw.end())
                throw std::invalid_argument("HoppingSet: missing mirror of offset (" +
                                            std::to_string(m.m1) + "," + std::to_string(m.m2) + ")");
            if (std::abs(it->second - v) > tol)
                throw std::invalid_argument("HoppingSet: J(m) != J(-m) for offset (" +
                                            std::to_string(m.m1) + "," + std::to_string(m.m2) + ")");
            J.entries_[m] = v;
        }
        return J;
    }

    const std::map<Offset, double>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    bool contains(Offset m) const { return entries_.count(m) != 0; }

    double at(Offset m) const {
        auto it = entries_.find(m);
        if (it == entries_.end())
            throw std::out_of_range("HoppingSet: offset not present");
        return it->second;
    }

    /// Largest |m1| or |m2| over the stored support.
    int max_extent() const {
        int e = 0;
        for (const auto& [m, J] : entries_)
            e = std::max({e, std::abs(m.m1), std::abs(m.m2)});
        return e;
    }

    /// Sum of |J_m| over all stored offsets; bounds |E(k)|.
    double abs_sum() const {
        double s = 0.0;
        for (const auto& [m, J] : entries_) s += std::abs(J);
        return s;
    }

private:
    std::map<Offset, double> entries_;
};

/// The paper's triangular-lattice shells in integer coordinates. Each entry
/// lists one representative per +/- pair.
inline const std::vector<std::vector<Offset>>& triangular_shells() {
    static const std::vector<std::vector<Offset>> shells = {
        {{1, 0}, {0, 1}, {1, 1}},
        {{2, 1}, {1, 2}, {-1, 1}},
        {{2, 0}, {0, 2}, {2, 2}},
    };
    return shells;
}

/// Three-shell triangular model from the shell amplitudes (J1, J2, J3).
inline HoppingSet triangular_three_shell(double J1, double J2, double J3) {
    HoppingSet J;
    const double v[3] = {J1, J2, J3};
    const auto& shells = triangular_shells();
    for (int s = 0; s < 3; ++s)
        for (const Offset& m : shells[s]) J.set_pair(m, v[s]);
    return J;
}

/// E(k) = -sum_m J_m cos(k.m). The cosine form is exact because the set
/// stores both m and -m with equal real amplitudes.
inline double dispersion_energy(const HoppingSet& J, const WaveVector& k) {
    double E = 0.0;
    for (const auto& [m, Jm] : J.entries()) E -= Jm * std::cos(dot(k, m));
    return E;
}

/// Group velocity grad E(k) = sum_m m J_m sin(k.m).
inline Vec2 group_velocity(const HoppingSet& J, const WaveVector& k) {
    Vec2 v;
    for (const auto& [m, Jm] : J.entries()) {
        const double s = Jm * std::sin(dot(k, m));
        v.x += m.m1 * s;
        v.y += m.m2 * s;
    }
    return v;
}

struct SymmetryViolation {
    Offset m;
    double J_plus = 0.0;   // J at m
    double J_minus = 0.0;  // J at -m (NaN if missing)
    bool missing_mirror = false;
};

struct ShellSpread {
    int shell = 0;       // 1-based shell index
    double spread = 0.0; // max - min of J within the shell
};

struct HoppingValidationReport {
    std::vector<SymmetryViolation> symmetry_violations;
    std::vector<ShellSpread> shell_spreads;  // filled only when shells given
    bool ok(double spread_tol = 0.0) const {
        if (!symmetry_violations.empty()) return false;
        if (spread_tol > 0.0)
            for (const auto& s : shell_spreads)
                if (s.spread > spread_tol) return false;
        return true;
    }
};

/// Check J_m = J_{-m} to within tol on raw table rows (as read from disk,
/// before the strict HoppingSet is built) and, when a shell partition is
/// supplied, report the max spread within each shell. Never throws on
/// violations; the report lists them.
inline HoppingValidationReport validate_hopping_rows(
    const std::vector<std::pair<Offset, double>>& rows, double tol,
    const std::vector<std::vector<Offset>>& shells = {}) {
    HoppingValidationReport rep;
    std::map<Offset, double> table(rows.begin(), rows.end());
    for (const auto& [m, Jm] : table) {
        if (m < m.negated()) continue;  // visit each pair once
        auto mirror = table.find(m.negated());
        if (mirror == table.end()) {
            rep.symmetry_violations.push_back({m, Jm, std::nan(""), true});
        } else if (std::abs(Jm - mirror->second) > tol) {
            rep.symmetry_violations.push_back({m, Jm, mirror->second, false});
        }
    }
    int idx = 1;
    for (const auto& shell : shells) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const Offset& m : shell) {
            for (const Offset& o : {m, m.negated()}) {
                auto it = table.find(o);
                if (it == table.end()) continue;
                lo = std::min(lo, it->second);
                hi = std::max(hi, it->second);
            }
        }
        if (hi >= lo) rep.shell_spreads.push_back({idx, hi - lo});
        ++idx;
    }
    return rep;
}

inline HoppingValidationReport validate_hopping_set(
    const HoppingSet& J, double tol,
    const std::vector<std::vector<Offset>>& shells = {}) {
    std::vector<std::pair<Offset, double>> rows(J.entries().begin(), J.entries().end());
    return validate_hopping_rows(rows, tol, shells);
}

/// Static force F = (F1,F2) in E_r per site, optionally declared commensurate
/// along the coprime integer direction (q,r): F.T = 2*pi*(q,r) for the Bloch
/// period T. The (q,r) sign is canonicalized so that T comes out positive.
struct ForceSpec {
    double F1 = 0.0;
    double F2 = 0.0;
    std::optional<std::pair<int, int>> qr;
    double qr_residual = 0.0;  // |F1*r - F2*q|/|F| recorded by rationalize_force

    Vec2 vec() const { return {F1, F2}; }

    static ForceSpec incommensurate(double F1, double F2) {
        ForceSpec f;
        f.F1 = F1;
        f.F2 = F2;
        return f;
    }

    /// Declare (q,r); throws unless gcd(|q|,|r|)=1 and F1*r = F2*q within
    /// rel_tol * |F|.
    static ForceSpec commensurate(double F1, double F2, int q, int r,
                                  double rel_tol = 1e-12) {
        if (q == 0 && r == 0)
            throw std::invalid_argument("ForceSpec: (q,r) = (0,0)");
        if (std::gcd(std::abs(q), std::abs(r)) != 1)
            throw std::invalid_argument("ForceSpec: q and r must be coprime");
        const double Fn = std::hypot(F1, F2);
        if (Fn == 0.0) throw std::invalid_argument("ForceSpec: zero force");
        if (std::abs(F1 * r - F2 * q) > rel_tol * Fn)
            throw std::invalid_argument(
                "ForceSpec: (q,r) not aligned with (F1,F2) within tolerance");
        // Positive Bloch period: q (or r when q=0) must carry the sign of F.
        if (q * F1 + r * F2 < 0.0) { q = -q; r = -r; }
        ForceSpec f;
        f.F1 = F1;
        f.F2 = F2;
        f.qr = {q, r};
        return f;
    }
};

}  // namespace bloch2d
