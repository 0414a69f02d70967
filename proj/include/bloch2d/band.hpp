#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "bloch2d/lattice.hpp"

namespace bloch2d {

/// Three-beam triangular optical lattice, red detuned: the potential is
/// V(r) = (V0/9) |sum_j exp(i k_j . r)|^2 with beams at 0, 120 and 240
/// degrees, |k_j| = 2*pi/lambda. The minima have value V0 and form a
/// triangular lattice of spacing 2*lambda/3.
struct OpticalPotentialSpec {
    double V0 = -1.5;  // potential minimum, units of E_r; <= 0

    explicit OpticalPotentialSpec(double V0_) : V0(V0_) {
        if (V0 > 0.0)
            throw std::invalid_argument("OpticalPotentialSpec: V0 must be <= 0 (red detuned)");
    }
};

/// Plane-wave basis: all reciprocal integer pairs n with |n1|,|n2| <= cutoff.
struct PlaneWaveBasis {
    int cutoff = 7;

    explicit PlaneWaveBasis(int Nc) : cutoff(Nc) {
        if (Nc < 1) throw std::invalid_argument("PlaneWaveBasis: cutoff must be >= 1");
    }

    int dim() const { return (2 * cutoff + 1) * (2 * cutoff + 1); }
    int index(int n1, int n2) const {
        return (n1 + cutoff) * (2 * cutoff + 1) + (n2 + cutoff);
    }
    bool contains(int n1, int n2) const {
        return std::abs(n1) <= cutoff && std::abs(n2) <= cutoff;
    }
};

/// Lowest-band energies E(theta1,theta2) on an M x M grid of reduced
/// coordinates theta_i = j/M, where k = theta1*b1 + theta2*b2.
struct BandSample {
    int M = 0;
    std::vector<double> values;  // row-major, values[j1*M + j2]

    double at(int j1, int j2) const { return values[j1 * M + j2]; }
    double average() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
};

/// Reciprocal basis vectors in units of kappa = 2*pi/lambda, fixed by
/// b_i . a_j = 2*pi*delta_ij with the direct basis at 120 degrees.
inline Vec2 reciprocal_b1() { return {1.5, std::sqrt(3.0) / 2.0}; }
inline Vec2 reciprocal_b2() { return {0.0, std::sqrt(3.0)}; }

/// First-shell reciprocal offsets coupled by the three-beam potential.
inline const std::vector<Offset>& potential_first_shell() {
    static const std::vector<Offset> shell = {
        {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
    return shell;
}

/// Fourier components of V(r) on the reciprocal integer lattice:
/// (0,0) -> V0/3 and each first-shell offset -> V0/9.
inline std::map<Offset, double> potential_fourier_components(const OpticalPotentialSpec& spec) {
    std::map<Offset, double> c;
    c[{0, 0}] = spec.V0 / 3.0;
    for (const Offset& g : potential_first_shell()) c[g] = spec.V0 / 9.0;
    return c;
}

/// Plane-wave Hamiltonian at reduced wave vector theta (components in [0,1)).
/// Kinetic part |(theta1+n1) b1 + (theta2+n2) b2|^2 in E_r; potential part
/// V0/3 on the diagonal and V0/9 between first-shell neighbours. Real
/// symmetric by construction.
inline Eigen::MatrixXd bloch_matrix(const OpticalPotentialSpec& spec,
                                    const PlaneWaveBasis& basis,
                                    double theta1, double theta2) {
    if (theta1 < 0.0 || theta1 >= 1.0 || theta2 < 0.0 || theta2 >= 1.0)
        throw std::invalid_argument("bloch_matrix: theta components must lie in [0,1)");
    const int Nc = basis.cutoff;
    const int D = basis.dim();
    const Vec2 b1 = reciprocal_b1(), b2 = reciprocal_b2();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(D, D);
    for (int n1 = -Nc; n1 <= Nc; ++n1) {
        for (int n2 = -Nc; n2 <= Nc; ++n2) {
            const int i = basis.index(n1, n2);
            const Vec2 K = (theta1 + n1) * b1 + (theta2 + n2) * b2;
            H(i, i) = dot(K, K) + spec.V0 / 3.0;
            for (const Offset& g : potential_first_shell()) {
                if (!basis.contains(n1 + g.m1, n2 + g.m2)) continue;
                H(i, basis.index(n1 + g.m1, n2 + g.m2)) = spec.V0 / 9.0;
            }
        }
    }
    return H;
}

/// Smallest eigenvalue of bloch_matrix over the M x M reduced grid.
/// Energies are variational: they decrease monotonically as the cutoff grows.
inline BandSample lowest_band(const OpticalPotentialSpec& spec,
                              const PlaneWaveBasis& basis, int M) {
    if (M < 8) throw std::invalid_argument("lowest_band: M must be >= 8");
    if (basis.cutoff < 3) throw std::invalid_argument("lowest_band: cutoff must be >= 3");
    BandSample band;
    band.M = M;
    band.values.assign(static_cast<std::size_t>(M) * M, 0.0);
    bool failed = false;
    // k-points are independent; deterministic write-by-index
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j1 = 0; j1 < M; ++j1) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        for (int j2 = 0; j2 < M; ++j2) {
            const Eigen::MatrixXd H = bloch_matrix(spec, basis,
                                                   static_cast<double>(j1) / M,
                                                   static_cast<double>(j2) / M);
            solver.compute(H, Eigen::EigenvaluesOnly);
            if (solver.info() != Eigen::Success) failed = true;
            band.values[static_cast<std::size_t>(j1) * M + j2] = solver.eigenvalues()(0);
        }
    }
    if (failed) throw std::runtime_error("lowest_band: eigensolver failed to converge");
    return band;
}

/// Raw inverse Fourier transform of a band sample:
/// J_m = -(1/M^2) sum_theta E(theta) cos(2*pi theta.m), for all offsets with
/// |m1|,|m2| <= m_max. Also reports the largest |imaginary| residue of the
/// complex transform, which must vanish for an even band, and the band
/// average as J0 = -mean(E).
struct RawHoppingTransform {
    std::map<Offset, double> J;
    double J0 = 0.0;
    double max_imag_residue = 0.0;
};

inline RawHoppingTransform hopping_transform(const BandSample& band, int m_max) {
    const int M = band.M;
    if (M <= 2 * m_max)
        throw std::invalid_argument("hopping_transform: need M > 2*m_max to avoid aliasing");
    RawHoppingTransform out;
    out.J0 = -band.average();
    for (int m1 = -m_max; m1 <= m_max; ++m1) {
        for (int m2 = -m_max; m2 <= m_max; ++m2) {
            if (m1 == 0 && m2 == 0) continue;
            double re = 0.0, im = 0.0;
            for (int j1 = 0; j1 < M; ++j1) {
                for (int j2 = 0; j2 < M; ++j2) {
                    const double phase = two_pi * (static_cast<double>(j1) * m1 +
                                                   static_cast<double>(j2) * m2) / M;
                    const double E = band.at(j1, j2);
                    re += E * std::cos(phase);
                    im -= E * std::sin(phase);
                }
            }
            out.J[{m1, m2}] = -re / (static_cast<double>(M) * M);
            out.max_imag_residue = std::max(out.max_imag_residue,
                                            std::abs(im) / (static_cast<double>(M) * M));
        }
    }
    return out;
}

struct ExtractedHoppings {
    HoppingSet hoppings;
    double J0 = 0.0;               // -(band average), constant term kept separate
    double max_imag_residue = 0.0; // diagnostic, must be < 1e-10 E_r
};

/// Restrict the inverse transform to the requested shells (each listed offset
/// and its mirror).
inline ExtractedHoppings extract_hoppings(const BandSample& band,
                                          const std::vector<std::vector<Offset>>& shells) {
    int m_max = 0;
    for (const auto& shell : shells)
        for (const Offset& m : shell)
            m_max = std::max({m_max, std::abs(m.m1), std::abs(m.m2)});
    const RawHoppingTransform raw = hopping_transform(band, m_max);
    ExtractedHoppings out;
    out.J0 = raw.J0;
    out.max_imag_residue = raw.max_imag_residue;
    for (const auto& shell : shells)
        for (const Offset& m : shell) out.hoppings.set_pair(m, raw.J.at(m));
    return out;
}

}  // namespace bloch2d
