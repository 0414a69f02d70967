#include <catch2/catch_amalgamated.hpp>

#include <fftw3.h>

#include <cmath>
#include <complex>

#include "bloch2d/evolve.hpp"
#include "bloch2d/packet.hpp"
#include "bloch2d/semiclassics.hpp"
#include "bloch2d/spectral.hpp"
#include "oracle_helpers.hpp"

using namespace bloch2d;

namespace {
const double kJ1 = 0.0765, kJ2 = -0.0149, kJ3 = -0.0078;
HoppingSet quoted_model() { return triangular_three_shell(kJ1, kJ2, kJ3); }

WavePacketGrid delta_at(int L, int m1, int m2) {
    auto psi = WavePacketGrid::zeros(L);
    psi.at(m1, m2) = 1.0;
    return psi;
}

std::complex<double> inner(const WavePacketGrid& a, const WavePacketGrid& b) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.amplitudes().size(); ++i)
        s += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    return s;
}
}  // namespace

TEST_CASE("gaussian packet basics") {
    const WavePacketGrid psi = gaussian_packet(121, 20.0, {0.05, 0.03});
    CHECK(total_norm(psi) == Catch::Approx(1.0).margin(1e-12));
    const Vec2 com = center_of_mass(psi);
    CHECK(com.x == Catch::Approx(0.0).margin(1e-13));
    CHECK(com.y == Catch::Approx(0.0).margin(1e-13));

    const WavePacketGrid real_psi = gaussian_packet(31, 5.0, {0.0, 0.0});
    for (const auto& a : real_psi.amplitudes()) {
        CHECK(a.imag() == 0.0);
        CHECK(a.real() > 0.0);
    }

    // too wide for the grid: the off-grid tail would exceed 1e-8
    CHECK_THROWS_AS(gaussian_packet(121, 30.0, {0.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(gaussian_packet(181, 30.0, {0.0, 0.0}));
    CHECK_THROWS_AS(gaussian_packet(120, 20.0, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_packet(121, -1.0, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("gaussian packet peaks at the grid momentum nearest k0") {
    const int L = 121;
    const WaveVector k0{0.05, 0.03};
    const WavePacketGrid psi = gaussian_packet(L, 20.0, k0);
    std::vector<std::complex<double>> work(psi.amplitudes());
    fftw_plan plan = fftw_plan_dft_2d(L, L, reinterpret_cast<fftw_complex*>(work.data()),
                                      reinterpret_cast<fftw_complex*>(work.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < work.size(); ++i)
        if (std::abs(work[i]) > std::abs(work[argmax])) argmax = i;
    const int j1 = static_cast<int>(argmax) / L, j2 = static_cast<int>(argmax) % L;
    const int e1 = static_cast<int>(std::lround(k0.k1 * L / two_pi));
    const int e2 = static_cast<int>(std::lround(k0.k2 * L / two_pi));
    CHECK(j1 == ((e1 % L) + L) % L);
    CHECK(j2 == ((e2 % L) + L) % L);
}

TEST_CASE("apply_hamiltonian stencil and tilt") {
    HoppingSet J;
    J.set_pair({1, 0}, 1.0);
    const ForceSpec none = ForceSpec::incommensurate(0.0, 0.0);
    const WavePacketGrid h = apply_hamiltonian(J, none, delta_at(9, 0, 0));
    CHECK(h.at(1, 0) == std::complex<double>(-1.0));
    CHECK(h.at(-1, 0) == std::complex<double>(-1.0));
    double rest = 0.0;
    for (const auto& a : h.amplitudes()) rest += std::abs(a);
    CHECK(rest == 2.0);

    const HoppingSet empty;
    const ForceSpec Fx = ForceSpec::incommensurate(1.0, 0.0);
    const WavePacketGrid tilt = apply_hamiltonian(empty, Fx, delta_at(9, 3, 0));
    CHECK(tilt.at(3, 0) == std::complex<double>(-3.0));

    // open boundary: neighbours outside the grid contribute nothing
    const WavePacketGrid edge = apply_hamiltonian(J, none, delta_at(9, 4, 0));
    CHECK(edge.at(3, 0) == std::complex<double>(-1.0));
    double total = 0.0;
    for (const auto& a : edge.amplitudes()) total += std::abs(a);
    CHECK(total == 1.0);
}

TEST_CASE("hamiltonian is hermitian on random states") {
    const HoppingSet J = quoted_model();
    const ForceSpec F = ForceSpec::incommensurate(0.03, -0.05);
    const int L = 15;
    for (int trial = 0; trial < 100; ++trial) {
        auto phi = WavePacketGrid::zeros(L);
        auto psi = WavePacketGrid::zeros(L);
        for (int m1 = -7; m1 <= 7; ++m1) {
            for (int m2 = -7; m2 <= 7; ++m2) {
                phi.at(m1, m2) = {oracle::uniform(-1, 1), oracle::uniform(-1, 1)};
                psi.at(m1, m2) = {oracle::uniform(-1, 1), oracle::uniform(-1, 1)};
            }
        }
        const auto Hpsi = apply_hamiltonian(J, F, psi);
        const auto Hphi = apply_hamiltonian(J, F, phi);
        CHECK(std::abs(inner(phi, Hpsi) - inner(Hphi, psi)) < 1e-12);
    }
}

TEST_CASE("observables on a point mass") {
    const WavePacketGrid psi = delta_at(11, 3, -2);
    CHECK(total_norm(psi) == 1.0);
    const Vec2 com = center_of_mass(psi);
    CHECK(com.x == 3.0);
    CHECK(com.y == -2.0);
    // site (3,-2) on L=11 sits 2 rings away from the edge
    CHECK(boundary_mass(psi, 2) == 0.0);
    CHECK(boundary_mass(psi, 3) == 1.0);
    CHECK_THROWS_AS(center_of_mass(WavePacketGrid::zeros(11)), std::invalid_argument);
    CHECK_THROWS_AS(boundary_mass(psi, 0), std::invalid_argument);

    const HoppingSet empty;
    const ForceSpec Fx = ForceSpec::incommensurate(0.5, 0.25);
    CHECK(energy(psi, empty, Fx) == Catch::Approx(-(0.5 * 3 + 0.25 * -2)).margin(1e-15));
}

TEST_CASE("energy expectation is real") {
    const HoppingSet J = quoted_model();
    const ForceSpec F = ForceSpec::incommensurate(0.02, -0.02);
    const WavePacketGrid psi = gaussian_packet(31, 5.0, {0.4, -0.2});
    const auto Hpsi = apply_hamiltonian(J, F, psi);
    CHECK(std::abs(inner(psi, Hpsi).imag()) < 1e-12);
    CHECK(energy(psi, J, F) == Catch::Approx(inner(psi, Hpsi).real()).margin(1e-13));
}

TEST_CASE("rk4 leaves a free single site alone and phases a tilted one") {
    const HoppingSet empty;
    EvolutionConfig cfg;
    cfg.t_end = 5.0;
    cfg.sample_stride = 16;

    const auto still = rk4_evolve(delta_at(9, 0, 0), empty,
                                  ForceSpec::incommensurate(0.0, 0.0), cfg);
    CHECK(still.abort == AbortReason::none);
    CHECK(still.final_state.at(0, 0) == std::complex<double>(1.0));
    for (const auto& row : still.rows) {
        CHECK(row.com1 == 0.0);
        CHECK(row.norm == 1.0);
    }

    // psi(t) = e^{i F1 t} psi(0) on a single tilted site at (1,0)
    const double F1 = 0.8;
    const ForceSpec Fx = ForceSpec::incommensurate(F1, 0.0);
    const auto phased = rk4_evolve(delta_at(9, 1, 0), empty, Fx, cfg);
    CHECK(phased.abort == AbortReason::none);
    const std::complex<double> expect =
        std::complex<double>(std::cos(F1 * cfg.t_end), std::sin(F1 * cfg.t_end));
    CHECK(std::abs(phased.final_state.at(1, 0) - expect) < 1e-6);   // O(dt^4) phase
    CHECK(std::abs(std::abs(phased.final_state.at(1, 0)) - 1.0) < 1e-7);
}

TEST_CASE("rk4 matches the spectral propagator on a short drive") {
    const HoppingSet J = quoted_model();
    const ForceSpec F = ForceSpec::commensurate(0.5 * kJ1, -0.5 * kJ1, 1, -1);
    const int L = 71;
    const WavePacketGrid psi0 = gaussian_packet(L, 8.0, {0.05, 0.03});

    EvolutionConfig cfg;
    cfg.t_end = 10.0 / kJ1;
    cfg.sample_stride = 200;
    const auto res = rk4_evolve(psi0, J, F, cfg);
    REQUIRE(res.abort == AbortReason::none);

    const WavePacketGrid spec = spectral_propagate(psi0, J, F, cfg.t_end);
    CHECK(std::abs(inner(res.final_state, spec)) > 0.9999);
    const Vec2 cr = center_of_mass(res.final_state);
    const Vec2 cs = center_of_mass(spec);
    CHECK(norm(cr - cs) < 1e-3);

    // norm and energy stay put along the run
    for (const auto& row : res.rows) {
        CHECK(std::abs(row.norm - 1.0) < 1e-6);
        CHECK(std::abs(row.energy - res.rows.front().energy) < 1e-6);
    }
}

TEST_CASE("spectral propagator round trip and free evolution") {
    const HoppingSet J = quoted_model();
    const ForceSpec none = ForceSpec::incommensurate(0.0, 0.0);
    const WavePacketGrid psi0 = gaussian_packet(61, 8.0, {0.3, -0.1});

    const WavePacketGrid back = spectral_propagate(psi0, J, none, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < back.amplitudes().size(); ++i)
        worst = std::max(worst, std::abs(back.amplitudes()[i] - psi0.amplitudes()[i]));
    CHECK(worst < 1e-13);

    // with F = 0 each mode only picks up the phase e^{-i E(k) t}
    const double t = 30.0;
    const WavePacketGrid evolved = spectral_propagate(psi0, J, none, t);
    CHECK(total_norm(evolved) == Catch::Approx(1.0).margin(1e-12));
    const int L = psi0.side();
    std::vector<std::complex<double>> f(psi0.amplitudes());
    fftw_plan plan = fftw_plan_dft_2d(L, L, reinterpret_cast<fftw_complex*>(f.data()),
                                      reinterpret_cast<fftw_complex*>(f.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    std::vector<std::complex<double>> g(evolved.amplitudes());
    fftw_plan plan2 = fftw_plan_dft_2d(L, L, reinterpret_cast<fftw_complex*>(g.data()),
                                       reinterpret_cast<fftw_complex*>(g.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan2);
    fftw_destroy_plan(plan);
    fftw_destroy_plan(plan2);
    double phase_err = 0.0;
    for (int j1 = 0; j1 < L; ++j1) {
        for (int j2 = 0; j2 < L; ++j2) {
            const std::size_t i = static_cast<std::size_t>(j1) * L + j2;
            if (std::abs(f[i]) < 1e-6) continue;
            const double E = dispersion_energy(J, {two_pi * j1 / L, two_pi * j2 / L});
            const std::complex<double> expect =
                f[i] * std::complex<double>(std::cos(E * t), -std::sin(E * t));
            phase_err = std::max(phase_err, std::abs(g[i] - expect));
        }
    }
    CHECK(phase_err < 1e-12);

    // boundary-mass precondition
    CHECK_THROWS_AS(spectral_propagate(delta_at(21, 9, 0), J, none, 1.0),
                    BoundaryMassError);
}

TEST_CASE("rk4 aborts on boundary contamination with a partial record") {
    HoppingSet J;
    J.set_pair({1, 0}, 1.0);
    J.set_pair({0, 1}, 1.0);
    EvolutionConfig cfg;
    cfg.t_end = 60.0;
    cfg.sample_stride = 5;
    cfg.boundary_tol = 1e-8;
    const auto res = rk4_evolve(gaussian_packet(31, 4.0, {0.0, 0.0}), J,
                                ForceSpec::incommensurate(0.0, 0.0), cfg);
    CHECK(res.abort == AbortReason::boundary_contamination);
    CHECK_FALSE(res.rows.empty());
    CHECK(res.rows.back().boundary_mass > cfg.boundary_tol);
    CHECK(res.last_valid_time < res.rows.back().t);
}

TEST_CASE("rk4 aborts on norm blow-up when driven past stability") {
    HoppingSet J;
    J.set_pair({1, 0}, 1.0);
    J.set_pair({0, 1}, 1.0);
    EvolutionConfig cfg;
    cfg.dt = 1.0;  // way past 2.83 / rho
    cfg.t_end = 200.0;
    cfg.sample_stride = 10;
    const auto res = rk4_evolve(gaussian_packet(31, 4.0, {0.0, 0.0}), J,
                                ForceSpec::incommensurate(0.0, 0.0), cfg);
    CHECK(res.abort == AbortReason::norm_drift);
}

TEST_CASE("evolution is deterministic") {
    const HoppingSet J = quoted_model();
    const ForceSpec F = ForceSpec::commensurate(0.5 * kJ1, -0.5 * kJ1, 1, -1);
    const WavePacketGrid psi0 = gaussian_packet(31, 4.0, {0.05, 0.03});
    EvolutionConfig cfg;
    cfg.t_end = 3.0;
    cfg.sample_stride = 7;
    const auto a = rk4_evolve(psi0, J, F, cfg);
    const auto b = rk4_evolve(psi0, J, F, cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].com1 == b.rows[i].com1);
        CHECK(a.rows[i].energy == b.rows[i].energy);
    }
    for (std::size_t i = 0; i < a.final_state.amplitudes().size(); ++i)
        CHECK(a.final_state.amplitudes()[i] == b.final_state.amplitudes()[i]);
}

TEST_CASE("stability step shrinks with force and grid") {
    const HoppingSet J = quoted_model();
    const ForceSpec weak = ForceSpec::incommensurate(0.01, 0.0);
    const ForceSpec strong = ForceSpec::incommensurate(0.1, 0.0);
    CHECK(stability_time_step(J, strong, 121) < stability_time_step(J, weak, 121));
    CHECK(stability_time_step(J, weak, 241) < stability_time_step(J, weak, 121));
}
