#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "bloch2d/lattice.hpp"

namespace bloch2d {

/// L x L complex amplitudes indexed by site offsets m in [-(L-1)/2,(L-1)/2]^2.
/// L is odd so the origin is a grid point. Normalized to unit total
/// probability at construction.
class WavePacketGrid {
public:
    WavePacketGrid(int L, std::vector<std::complex<double>> amplitudes)
        : L_(L), amp_(std::move(amplitudes)) {
        if (L < 3 || L % 2 == 0)
            throw std::invalid_argument("WavePacketGrid: L must be odd and >= 3");
        if (amp_.size() != static_cast<std::size_t>(L) * L)
            throw std::invalid_argument("WavePacketGrid: amplitude count != L*L");
    }

    static WavePacketGrid zeros(int L) {
        return WavePacketGrid(L, std::vector<std::complex<double>>(
                                     static_cast<std::size_t>(L) * L));
    }

    int side() const { return L_; }
    int halfwidth() const { return (L_ - 1) / 2; }

    std::size_t index(int m1, int m2) const {
        return static_cast<std::size_t>(m1 + halfwidth()) * L_ + (m2 + halfwidth());
    }
    std::complex<double>& at(int m1, int m2) { return amp_[index(m1, m2)]; }
    const std::complex<double>& at(int m1, int m2) const { return amp_[index(m1, m2)]; }

    std::complex<double>* data() { return amp_.data(); }
    const std::complex<double>* data() const { return amp_.data(); }
    const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

private:
    int L_;
    std::vector<std::complex<double>> amp_;
};

/// Total probability.
inline double total_norm(const WavePacketGrid& psi) {
    double n = 0.0;
    for (const auto& a : psi.amplitudes()) n += std::norm(a);
    return n;
}

/// Probability-weighted mean site label.
inline Vec2 center_of_mass(const WavePacketGrid& psi) {
    const int c = psi.halfwidth();
    double n = 0.0, s1 = 0.0, s2 = 0.0;
    for (int m1 = -c; m1 <= c; ++m1) {
        for (int m2 = -c; m2 <= c; ++m2) {
            const double w = std::norm(psi.at(m1, m2));
            n += w;
            s1 += w * m1;
            s2 += w * m2;
        }
    }
    if (n == 0.0) throw std::invalid_argument("center_of_mass: zero-norm state");
    return {s1 / n, s2 / n};
}

/// Probability within `band` sites of any edge of the grid.
inline double boundary_mass(const WavePacketGrid& psi, int band) {
    const int L = psi.side();
    if (band < 1 || 2 * band >= L)
        throw std::invalid_argument("boundary_mass: band must satisfy 1 <= band < L/2");
    double outer = 0.0;
    const int c = psi.halfwidth();
    for (int m1 = -c; m1 <= c; ++m1) {
        for (int m2 = -c; m2 <= c; ++m2) {
            if (std::abs(m1) > c - band || std::abs(m2) > c - band)
                outer += std::norm(psi.at(m1, m2));
        }
    }
    return outer;
}

/// Gaussian packet psi_m = A exp(-(m1^2+m2^2)/sigma^2 + i k0.m), A fixed by
/// unit norm. Rejects sigma too large for the grid: the mass the infinite
/// Gaussian would carry beyond the grid must stay below tail_tol.
inline WavePacketGrid gaussian_packet(int L, double sigma, const WaveVector& k0,
                                      double tail_tol = 1e-8) {
    if (L < 3 || L % 2 == 0)
        throw std::invalid_argument("gaussian_packet: L must be odd and >= 3");
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_packet: sigma must be > 0");
    const int c = (L - 1) / 2;

    // 1D weights on the grid and the tail of the infinite sum beyond it.
    std::vector<double> g(L);
    double on_grid = 0.0;
    for (int m = -c; m <= c; ++m) {
        g[m + c] = std::exp(-static_cast<double>(m) * m / (sigma * sigma));
        on_grid += g[m + c] * g[m + c];
    }
    double full = on_grid;
    for (int m = c + 1;; ++m) {
        const double w = std::exp(-2.0 * static_cast<double>(m) * m / (sigma * sigma));
        full += 2.0 * w;
        if (w < 1e-300 || w < 1e-20 * full) break;
    }
    const double tail_1d = 1.0 - on_grid / full;
    // two axes; the 2D weight factorizes
    const double tail = 2.0 * tail_1d - tail_1d * tail_1d;
    if (tail > tail_tol)
        throw std::invalid_argument(
            "gaussian_packet: sigma too large for L (tail mass beyond grid " +
            std::to_string(tail) + " > tolerance)");

    auto psi = WavePacketGrid::zeros(L);
    for (int m1 = -c; m1 <= c; ++m1) {
        for (int m2 = -c; m2 <= c; ++m2) {
            const double phase = k0.k1 * m1 + k0.k2 * m2;
            psi.at(m1, m2) = g[m1 + c] * g[m2 + c] *
                             std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }
    const double A = 1.0 / std::sqrt(total_norm(psi));
    for (int m1 = -c; m1 <= c; ++m1)
        for (int m2 = -c; m2 <= c; ++m2) psi.at(m1, m2) *= A;
    return psi;
}

}  // namespace bloch2d
