#include <doctest.h>

#include <cmath>
#include <complex>

#include "rsvd/matgroup.hpp"
#include "rsvd/sampling.hpp"

using namespace rsvd;
using namespace rsvd::matgroup;

namespace {

ObservableTriple random_triple(int n, SplitMix64& rng, double scale = 0.5) {
    const int m = 2 * n;
    const MasterPoint p = decompose_kb(random_sl(m, rng, scale));
    CVec w_hat = CVec::Zero(m);
    for (int i = 0; i < n; ++i) w_hat[i] = rng.cnormal();
    return observables(p, w_hat);
}

// Test-side fixed-step RK4 over the triple field; the independent check
// for the exact propagator.
ObservableTriple rk4_triple(FlowFamily fam, int l, ObservableTriple t,
                            double t_end, double dt) {
    const long steps = std::lround(t_end / dt);
    auto add = [](const ObservableTriple& s, double c, const TripleDerivative& d) {
        return ObservableTriple{s.Omega + c * d.dOmega, s.L + c * d.dL, s.w + c * d.dw};
    };
    for (long s = 0; s < steps; ++s) {
        const auto k1 = triple_vector_field(fam, l, t);
        const auto k2 = triple_vector_field(fam, l, add(t, 0.5 * dt, k1));
        const auto k3 = triple_vector_field(fam, l, add(t, 0.5 * dt, k2));
        const auto k4 = triple_vector_field(fam, l, add(t, dt, k3));
        t.Omega += (dt / 6.0) * (k1.dOmega + 2.0 * k2.dOmega + 2.0 * k3.dOmega + k4.dOmega);
        t.L += (dt / 6.0) * (k1.dL + 2.0 * k2.dL + 2.0 * k3.dL + k4.dL);
        t.w += (dt / 6.0) * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
    }
    return t;
}

}  // namespace

TEST_CASE("decompose_kb: identity and triangular fixed points") {
    const CMat id = CMat::Identity(4, 4);
    const MasterPoint p = decompose_kb(id);
    CHECK((p.k - id).norm() < 1e-14);
    CHECK((p.b - id).norm() < 1e-14);

    SplitMix64 rng(1);
    const CMat b0 = random_triangular_b(4, rng);
    const MasterPoint q = decompose_kb(b0);
    CHECK((q.k - id).norm() < 1e-12);
    CHECK((q.b - b0).norm() < 1e-12);
}

TEST_CASE("decompose_kb: reassembly, structure, idempotence") {
    SplitMix64 rng(2);
    for (int n = 1; n <= 4; ++n) {
        const int m = 2 * n;
        for (int rep = 0; rep < 25; ++rep) {
            const CMat g = random_sl(m, rng, 0.7);
            const MasterPoint p = decompose_kb(g);
            CHECK((p.k * p.b - g).norm() <= 1e-10);
            CHECK((p.k.adjoint() * p.k - CMat::Identity(m, m)).norm() <= 1e-10);
            CHECK(is_upper_triangular(p.b, 0.0));
            for (int i = 0; i < m; ++i) {
                CHECK(p.b(i, i).imag() == 0.0);
                CHECK(p.b(i, i).real() > 0.0);
            }
            CHECK(std::abs(p.b.determinant() - Complex(1, 0)) < 1e-10);
            // uniqueness via idempotence on the factors
            const MasterPoint pk = decompose_kb(p.k * p.b);
            CHECK((pk.k - p.k).norm() < 1e-9);
            CHECK((pk.b - p.b).norm() < 1e-9);
        }
    }
}

TEST_CASE("decompose_kb: error paths") {
    CMat bad = CMat::Zero(2, 2);
    bad(0, 0) = 1.0;  // rank 1
    CHECK_THROWS_AS(decompose_kb(bad), SingularInput);

    CHECK_THROWS_AS(decompose_kb(CMat(2.0 * CMat::Identity(2, 2))), std::invalid_argument);
}

TEST_CASE("decompose_bk: identity, unitary fixed point, reassembly") {
    const CMat id = CMat::Identity(4, 4);
    auto [b, k] = decompose_bk(id);
    CHECK((b - id).norm() < 1e-14);
    CHECK((k - id).norm() < 1e-14);

    SplitMix64 rng(3);
    const CMat k0 = random_special_unitary(4, rng);
    auto [b1, k1] = decompose_bk(k0);
    CHECK((b1 - id).norm() < 1e-12);
    CHECK((k1 - k0).norm() < 1e-12);

    for (int rep = 0; rep < 20; ++rep) {
        const CMat g = random_sl(6, rng, 0.6);
        auto [bl, kr] = decompose_bk(g);
        CHECK((bl * kr - g).norm() <= 1e-10);
        CHECK(is_upper_triangular(bl, 0.0));
        CHECK((kr.adjoint() * kr - CMat::Identity(6, 6)).norm() <= 1e-10);
    }
}

TEST_CASE("dress_right: trivial cases and K_+ closure") {
    SplitMix64 rng(4);
    const int n = 2, m = 2 * n;
    const CMat b = random_triangular_b(m, rng);

    auto [ft, bp] = dress_right(b, CMat(CMat::Identity(m, m)));
    CHECK((ft - CMat::Identity(m, m)).norm() < 1e-12);
    CHECK((bp - b).norm() < 1e-12);

    const CMat f = random_k_plus(n, rng);
    auto [ft2, bp2] = dress_right(CMat(CMat::Identity(m, m)), f);
    CHECK((ft2 - f).norm() < 1e-10);
    CHECK((bp2 - CMat::Identity(m, m)).norm() < 1e-10);

    for (int rep = 0; rep < 20; ++rep) {
        const CMat bb = random_triangular_b(m, rng);
        const CMat ff = random_k_plus(n, rng);
        auto [ftt, bpp] = dress_right(bb, ff);
        CHECK((ftt * bb * ff.adjoint() - bpp).norm() <= 1e-10);
        CHECK(ftt.block(0, n, n, n).norm() <= 1e-10);  // stays block diagonal
        CHECK(ftt.block(n, 0, n, n).norm() <= 1e-10);
    }
}

TEST_CASE("observables: identity point, unitary L, fixed-vector relation") {
    const int n = 2, m = 2 * n;
    SplitMix64 rng(5);
    CVec w_hat = CVec::Zero(m);
    w_hat[0] = Complex(0.4, 0.1);
    w_hat[1] = Complex(-0.3, 0.2);

    MasterPoint idp{CMat::Identity(m, m), CMat::Identity(m, m)};
    const ObservableTriple t0 = observables(idp, w_hat);
    CHECK((t0.Omega - CMat::Identity(m, m)).norm() < 1e-14);
    CHECK((t0.L - CMat::Identity(m, m)).norm() < 1e-14);
    CHECK((t0.w - w_hat).norm() < 1e-14);

    // b = id: Omega = id and L is unitary with unimodular spectrum
    MasterPoint kp{random_special_unitary(m, rng), CMat::Identity(m, m)};
    const ObservableTriple t1 = observables(kp, w_hat);
    CHECK((t1.Omega - CMat::Identity(m, m)).norm() < 1e-12);
    Eigen::ComplexEigenSolver<CMat> es(t1.L);
    for (int i = 0; i < m; ++i)
        CHECK(std::abs(std::abs(es.eigenvalues()[i]) - 1.0) < 1e-10);

    // L I w = w whenever I w_hat = w_hat
    const CMat sig = signature_matrix(m);
    for (int rep = 0; rep < 20; ++rep) {
        const ObservableTriple t = random_triple(n, rng);
        CHECK((t.L * sig * t.w - t.w).norm() <= 1e-10);
        CHECK((t.L.adjoint() - sig * t.L * sig).norm() <= 1e-10);
    }

    CVec bad = CVec::Ones(m);
    CHECK_THROWS_AS(observables(idp, bad), BadWHat);
}

TEST_CASE("pairing: hand value, symmetry, null cases") {
    CMat x = CMat::Zero(2, 2), y = CMat::Zero(2, 2);
    x(0, 0) = Complex(0, 1);
    x(1, 1) = Complex(0, -1);
    y(0, 0) = 1.0;
    y(1, 1) = -1.0;
    CHECK(pairing(x, y) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(pairing(y, x) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(pairing(x, CMat(CMat::Zero(2, 2))) == 0.0);
}

TEST_CASE("lie_project: fixed points, reassembly, involution") {
    SplitMix64 rng(6);
    const int m = 6;

    // anti-Hermitian input
    CMat a = random_complex_gaussian(m, m, rng);
    CMat anti = a - a.adjoint();
    anti -= (anti.trace() / static_cast<double>(m)) * CMat::Identity(m, m);
    auto [ak, ab] = lie_project(anti);
    CHECK((ak - anti).norm() < 1e-13);
    CHECK(ab.norm() < 1e-13);

    // upper triangular, real diagonal input
    CMat up = CMat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) up(i, j) = (i == j) ? Complex(rng.normal(), 0) : rng.cnormal();
    up -= (up.trace() / static_cast<double>(m)) * CMat::Identity(m, m);
    auto [uk, ub] = lie_project(up);
    CHECK(uk.norm() < 1e-13);
    CHECK((ub - up).norm() < 1e-13);

    for (int rep = 0; rep < 20; ++rep) {
        CMat x = random_complex_gaussian(m, m, rng);
        x -= (x.trace() / static_cast<double>(m)) * CMat::Identity(m, m);
        auto [xk, xb] = lie_project(x);
        CHECK((xk + xb - x).norm() < 1e-12);
        CHECK((xk + xk.adjoint()).norm() < 1e-12);  // anti-Hermitian
        CHECK(is_upper_triangular(xb, 1e-14));
        for (int i = 0; i < m; ++i) CHECK(std::abs(xb(i, i).imag()) < 1e-14);
        CHECK(std::abs(xk.trace()) < 1e-12);
        CHECK(std::abs(xb.trace()) < 1e-12);

        // applying the splitting to a component reproduces it
        auto [kk, kb] = lie_project(xk);
        CHECK((kk - xk).norm() < 1e-13);
        CHECK(kb.norm() < 1e-13);
    }
}

TEST_CASE("gradients: constant function and closed-form F_l gradients") {
    const int n = 2, m = 2 * n;
    SplitMix64 rng(7);
    const LieAlgebraBasis basis(m);
    const CMat g = random_sl(m, rng, 0.5);

    const GradientPair zero = gradients([](const CMat&) { return 1.5; }, g, basis);
    CHECK(zero.left.norm() < 1e-9);
    CHECK(zero.right.norm() < 1e-9);

    // nabla F_l = i[(g g^dag)^l - nu id], nabla' F_l = i[(g^dag g)^l - nu id]
    for (int l : {1, 2}) {
        const GradientPair d = gradients(free_hamiltonian_on_group(FlowFamily::F, l), g, basis);
        const CMat left_m = matrix_power(g * g.adjoint(), l);
        const CMat right_m = matrix_power(g.adjoint() * g, l);
        const double nu = left_m.trace().real() / m;
        const CMat want_left = Complex(0, 1) * (left_m - nu * CMat::Identity(m, m));
        const CMat want_right = Complex(0, 1) * (right_m - nu * CMat::Identity(m, m));
        CHECK((d.left - want_left).norm() <= 2e-6);
        CHECK((d.right - want_right).norm() <= 2e-6);
    }
}

TEST_CASE("gradients: right gradient of Phi_l lies in the triangular algebra") {
    const int n = 2, m = 2 * n;
    SplitMix64 rng(8);
    const LieAlgebraBasis basis(m);
    for (int rep = 0; rep < 3; ++rep) {
        const CMat g = random_sl(m, rng, 0.5);
        for (int l : {1, 2}) {
            const GradientPair d =
                gradients(free_hamiltonian_on_group(FlowFamily::Phi, l), g, basis);
            const auto [dk, db] = lie_project(d.right);
            CHECK(dk.norm() <= 2e-6 * std::max(1.0, d.right.norm()));
        }
    }
}

TEST_CASE("gradients: left/right related by conjugation") {
    const int m = 4;
    SplitMix64 rng(9);
    const LieAlgebraBasis basis(m);
    const CMat g = random_sl(m, rng, 0.5);
    const CMat probe = random_complex_gaussian(m, m, rng);
    const GroupFunction f = [probe](const CMat& gg) { return (probe * gg).trace().real(); };
    const GradientPair d = gradients(f, g, basis);
    CHECK((d.right - g.inverse() * d.left * g).norm() <= 2e-6 * std::max(1.0, d.left.norm()));
}

TEST_CASE("poisson_bracket: matches the analytic F_1 flow derivative") {
    const int n = 2, m = 2 * n;
    SplitMix64 rng(10);
    const LieAlgebraBasis basis(m);
    const CMat g = random_sl(m, rng, 0.4);
    const MasterPoint p = decompose_kb(g);
    const CMat omega = p.b * p.b.adjoint();
    const double nu = omega.trace().real() / m;

    const CMat probe = random_complex_gaussian(m, m, rng);
    const GroupFunction psi = [probe](const CMat& gg) { return (probe * gg).trace().real(); };

    // d psi/dt along k_dot = i k (Omega - nu id), b_dot = 0
    const CMat gdot = p.k * (Complex(0, 1) * (omega - nu * CMat::Identity(m, m))) * p.b;
    const double analytic = (probe * gdot).trace().real();
    const double bracket = poisson_bracket(psi, free_hamiltonian_on_group(FlowFamily::F, 1),
                                           g, basis);
    CHECK(bracket == doctest::Approx(analytic).epsilon(1e-5));
}

TEST_CASE("poisson_bracket: involution inside each family, antisymmetry") {
    SplitMix64 rng(11);
    for (int n : {1, 2}) {
        const int m = 2 * n;
        const LieAlgebraBasis basis(m);
        for (int rep = 0; rep < 3; ++rep) {
            const CMat g = random_sl(m, rng, 0.4);
            for (auto fam : {FlowFamily::F, FlowFamily::Phi}) {
                for (auto [l1, l2] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
                    const double v = poisson_bracket(free_hamiltonian_on_group(fam, l1),
                                                     free_hamiltonian_on_group(fam, l2),
                                                     g, basis);
                    CHECK(std::abs(v) <= 1e-6);
                }
            }
        }
        // cross-family bracket is generically nonzero; record, do not assert zero
        const CMat g = random_sl(m, rng, 0.4);
        const double cross = poisson_bracket(free_hamiltonian_on_group(FlowFamily::F, 1),
                                             free_hamiltonian_on_group(FlowFamily::Phi, 1),
                                             g, basis);
        MESSAGE("{F1, Phi1} at a random point (n=", n, "): ", cross);
        const double flipped = poisson_bracket(free_hamiltonian_on_group(FlowFamily::Phi, 1),
                                               free_hamiltonian_on_group(FlowFamily::F, 1),
                                               g, basis);
        CHECK(cross == doctest::Approx(-flipped).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("free_hamiltonian: identity values and non-real trace guard") {
    const int n = 3, m = 2 * n;
    ObservableTriple t{CMat::Identity(m, m), CMat::Identity(m, m), CVec::Zero(m)};
    for (int l = 1; l <= 4; ++l) {
        CHECK(free_hamiltonian(FlowFamily::F, l, t) ==
              doctest::Approx(static_cast<double>(n) / l).epsilon(1e-14));
        CHECK(free_hamiltonian(FlowFamily::Phi, l, t) ==
              doctest::Approx(static_cast<double>(n) / l).epsilon(1e-14));
    }

    ObservableTriple bad = t;
    bad.L(0, 0) = Complex(0.0, 1.0);
    CHECK_THROWS_AS(free_hamiltonian(FlowFamily::Phi, 1, bad), NonRealTrace);
}

TEST_CASE("triple_vector_field: stationary cases and trace invariant") {
    SplitMix64 rng(12);
    const int n = 2, m = 2 * n;
    const CMat sig = signature_matrix(m);

    ObservableTriple t = random_triple(n, rng);
    ObservableTriple omega_id = t;
    omega_id.Omega = CMat::Identity(m, m);
    const TripleDerivative df = triple_vector_field(FlowFamily::F, 2, omega_id);
    CHECK(df.dOmega.norm() == 0.0);
    CHECK(df.dL.norm() < 1e-14);
    CHECK(df.dw.norm() < 1e-14);

    ObservableTriple l_id = t;
    l_id.L = CMat::Identity(m, m);
    const TripleDerivative dp = triple_vector_field(FlowFamily::Phi, 2, l_id);
    CHECK(dp.dL.norm() < 1e-14);
    CHECK(dp.dw.norm() < 1e-14);
    CHECK(dp.dOmega.norm() < 1e-14);

    // d/dt tr(L I) vanishes along the F flow (commutator trace)
    for (int l : {1, 2, 3}) {
        const TripleDerivative d = triple_vector_field(FlowFamily::F, l, t);
        CHECK(std::abs((d.dL * sig).trace()) < 1e-12);
    }
}

TEST_CASE("exact_F_flow: trivial cases, integrator oracle, isospectrality") {
    SplitMix64 rng(13);
    const int n = 2, m = 2 * n;
    const ObservableTriple t0 = random_triple(n, rng);

    const ObservableTriple still = exact_F_flow(t0, 1, 0.0);
    CHECK((still.L - t0.L).norm() < 1e-12);
    CHECK((still.w - t0.w).norm() < 1e-12);

    ObservableTriple omega_id = t0;
    omega_id.Omega = CMat::Identity(m, m);
    const ObservableTriple frozen = exact_F_flow(omega_id, 2, 0.7);
    CHECK((frozen.L - omega_id.L).norm() < 1e-12);
    CHECK((frozen.w - omega_id.w).norm() < 1e-12);

    // cross-check against a fixed-step RK4 of the same vector field
    for (int l : {1, 2}) {
        const ObservableTriple exact = exact_F_flow(t0, l, 0.1);
        const ObservableTriple stepped = rk4_triple(FlowFamily::F, l, t0, 0.1, 1e-4);
        CHECK((exact.L - stepped.L).norm() <= 1e-7);
        CHECK((exact.w - stepped.w).norm() <= 1e-7);
        CHECK((exact.Omega - t0.Omega).norm() == 0.0);
    }

    // spectrum of L is carried by a unitary conjugation
    Eigen::ComplexEigenSolver<CMat> before(t0.L);
    const ObservableTriple moved = exact_F_flow(t0, 1, 1.3);
    Eigen::ComplexEigenSolver<CMat> after(moved.L);
    auto sorted_args = [](const Eigen::ComplexEigenSolver<CMat>& es) {
        std::vector<double> a;
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            a.push_back(std::arg(es.eigenvalues()[i]));
        std::sort(a.begin(), a.end());
        return a;
    };
    const auto a0 = sorted_args(before), a1 = sorted_args(after);
    for (std::size_t i = 0; i < a0.size(); ++i)
        CHECK(std::abs(a0[i] - a1[i]) <= 1e-9);

    // F_m frozen along the flow
    for (int mth = 1; mth <= 3; ++mth)
        CHECK(free_hamiltonian(FlowFamily::F, mth, moved) ==
              doctest::Approx(free_hamiltonian(FlowFamily::F, mth, t0)).epsilon(1e-12));
}

TEST_CASE("integrate_Phi_flow: conservation, trivial cases, step guard") {
    SplitMix64 rng(14);
    const int n = 2, m = 2 * n;
    const CMat sig = signature_matrix(m);
    const ObservableTriple t0 = random_triple(n, rng);

    const TripleTrajectory single = integrate_Phi_flow(t0, 1, 0.0, 1e-3);
    CHECK(single.states.size() == 1);

    ObservableTriple l_id = t0;
    l_id.L = CMat::Identity(m, m);
    const TripleTrajectory frozen = integrate_Phi_flow(l_id, 1, 0.05, 1e-3);
    CHECK((frozen.states.back().L - l_id.L).norm() < 1e-12);
    CHECK((frozen.states.back().w - l_id.w).norm() < 1e-12);

    const TripleTrajectory traj = integrate_Phi_flow(t0, 1, 1.0, 1e-3);
    const double det0 = t0.Omega.determinant().real();
    for (int mth = 1; mth <= 3; ++mth) {
        const double ref = free_hamiltonian(FlowFamily::Phi, mth, t0);
        CHECK(std::abs(free_hamiltonian(FlowFamily::Phi, mth, traj.states.back()) - ref) <= 1e-8);
    }
    CHECK(std::abs(traj.states.back().Omega.determinant().real() - det0) <= 1e-8);
    const double rel0 = (t0.L * sig * t0.w - t0.w).norm();
    const double rel1 =
        (traj.states.back().L * sig * traj.states.back().w - traj.states.back().w).norm();
    CHECK(std::abs(rel1 - rel0) <= 1e-8);

    CHECK_THROWS_AS(integrate_Phi_flow(t0, 1, 4.0, 2.0), StepTooLarge);
}

TEST_CASE("integrate_Phi_flow: fourth-order step refinement") {
    SplitMix64 rng(15);
    const ObservableTriple t0 = random_triple(1, rng);

    // Richardson probe: endpoint error shrinks ~16x when dt halves.
    const ObservableTriple fine = rk4_triple(FlowFamily::Phi, 1, t0, 0.5, 1.0 / 4096.0);
    const ObservableTriple c1 = rk4_triple(FlowFamily::Phi, 1, t0, 0.5, 1.0 / 64.0);
    const ObservableTriple c2 = rk4_triple(FlowFamily::Phi, 1, t0, 0.5, 1.0 / 128.0);
    const double e1 = (c1.L - fine.L).norm() + (c1.w - fine.w).norm();
    const double e2 = (c2.L - fine.L).norm() + (c2.w - fine.w).norm();
    const double ratio = e1 / e2;
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
}
