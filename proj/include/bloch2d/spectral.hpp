#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "bloch2d/lattice.hpp"
#include "bloch2d/packet.hpp"

namespace bloch2d {

/// Raised when the torus treatment behind the spectral propagator is not
/// justified: too much probability near the grid edge.
struct BoundaryMassError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Phi(k,t) = int_0^t E(k + F t1) dt1. E is a finite cosine series, so each
/// harmonic integrates in closed form.
inline double phase_integral(const HoppingSet& J, const ForceSpec& F,
                             double k1, double k2, double t) {
    double phi = 0.0;
    for (const auto& [m, Jm] : J.entries()) {
        const double km = k1 * m.m1 + k2 * m.m2;
        const double fm = F.F1 * m.m1 + F.F2 * m.m2;
        if (fm == 0.0)
            phi -= Jm * t * std::cos(km);
        else
            phi -= Jm * (std::sin(km + fm * t) - std::sin(km)) / fm;
    }
    return phi;
}

}  // namespace detail

/// Acceleration-gauge propagation on the L x L torus, exact for the infinite
/// lattice restricted to it:
///   psi_m(t) = e^{i F.m t} * IFFT[ FFT[psi_0] * e^{-i Phi(k,t)} ]_m .
/// Single shot to any t. Both the input and the result must keep their mass
/// away from the boundary (checked against boundary_tol over a band of
/// boundary_band sites), otherwise the torus wrap would be unphysical.
inline WavePacketGrid spectral_propagate(const WavePacketGrid& psi0,
                                         const HoppingSet& J, const ForceSpec& F,
                                         double t, int boundary_band = 2,
                                         double boundary_tol = 1e-8) {
    const int L = psi0.side();
    const double bm0 = boundary_mass(psi0, boundary_band);
    if (bm0 > boundary_tol)
        throw BoundaryMassError("spectral_propagate: initial boundary mass " +
                                std::to_string(bm0) + " exceeds tolerance");

    const std::size_t n = static_cast<std::size_t>(L) * L;
    std::vector<std::complex<double>> work(psi0.amplitudes());

    fftw_plan fwd = fftw_plan_dft_2d(
        L, L, reinterpret_cast<fftw_complex*>(work.data()),
        reinterpret_cast<fftw_complex*>(work.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_2d(
        L, L, reinterpret_cast<fftw_complex*>(work.data()),
        reinterpret_cast<fftw_complex*>(work.data()), FFTW_BACKWARD, FFTW_ESTIMATE);

    fftw_execute(fwd);

    // k_j = 2*pi*j/L; Phi is 2*pi-periodic so no BZ folding is needed here.
    for (int j1 = 0; j1 < L; ++j1) {
        const double k1 = two_pi * j1 / L;
        for (int j2 = 0; j2 < L; ++j2) {
            const double k2 = two_pi * j2 / L;
            const double phi = detail::phase_integral(J, F, k1, k2, t);
            work[static_cast<std::size_t>(j1) * L + j2] *=
                std::complex<double>(std::cos(phi), -std::sin(phi));
        }
    }

    fftw_execute(bwd);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);

    // unnormalized FFTW round trip scales by L^2; fold in the force phase
    const int c = (L - 1) / 2;
    const double scale = 1.0 / static_cast<double>(n);
    for (int m1 = -c; m1 <= c; ++m1) {
        for (int m2 = -c; m2 <= c; ++m2) {
            const double phase = (F.F1 * m1 + F.F2 * m2) * t;
            work[static_cast<std::size_t>(m1 + c) * L + (m2 + c)] *=
                scale * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }

    WavePacketGrid out(L, std::move(work));
    const double bm1 = boundary_mass(out, boundary_band);
    if (bm1 > boundary_tol)
        throw BoundaryMassError("spectral_propagate: boundary mass " +
                                std::to_string(bm1) + " at t=" + std::to_string(t) +
                                " exceeds tolerance");
    return out;
}

}  // namespace bloch2d
