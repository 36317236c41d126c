#include "rsvd/matgroup.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace rsvd::matgroup {

namespace {

constexpr double kRankTol = 1e-12;

// exp(A) for probe directions with ||A|| ~ 1e-5; the quartic Taylor tail
// is below double precision there.
CMat expm_small(const CMat& a) {
    const int m = static_cast<int>(a.rows());
    CMat a2 = a * a;
    CMat a3 = a2 * a;
    return CMat::Identity(m, m) + a + 0.5 * a2 + (1.0 / 6.0) * a3;
}

// Reversal permutation J (antidiagonal ones).
CMat reversal(int m) {
    CMat j = CMat::Zero(m, m);
    for (int i = 0; i < m; ++i) j(i, m - 1 - i) = 1.0;
    return j;
}

bool is_block_diagonal(const CMat& f, double tol) {
    const int m = static_cast<int>(f.rows());
    const int n = m / 2;
    return f.block(0, n, n, n).norm() <= tol && f.block(n, 0, n, n).norm() <= tol;
}

}  // namespace

// ----------------------------- decompositions ------------------------------

MasterPoint decompose_kb(const CMat& g) {
    const int m = static_cast<int>(g.rows());
    if (g.cols() != m) throw std::invalid_argument("decompose_kb: matrix not square");

    const Complex det = g.determinant();
    if (std::abs(det) < kRankTol) throw SingularInput("decompose_kb: input is numerically singular");
    if (std::abs(det - Complex(1.0, 0.0)) > 1e-8)
        throw std::invalid_argument("decompose_kb: |det g - 1| exceeds 1e-8");

    CMat k(m, m);
    CMat b = CMat::Zero(m, m);

    // Gram-Schmidt over columns with one re-orthogonalization pass.
    for (int j = 0; j < m; ++j) {
        CVec v = g.col(j);
        const double col_scale = v.norm();
        for (int i = 0; i < j; ++i) {
            const Complex r = k.col(i).dot(v);  // conj(k_i) . v
            b(i, j) += r;
            v -= r * k.col(i);
        }
        for (int i = 0; i < j; ++i) {
            const Complex r = k.col(i).dot(v);
            b(i, j) += r;
            v -= r * k.col(i);
        }
        const double rjj = v.norm();
        if (rjj <= kRankTol * std::max(1.0, col_scale))
            throw SingularInput("decompose_kb: column " + std::to_string(j) + " is dependent");
        b(j, j) = rjj;
        k.col(j) = v / rjj;
    }
    return {k, b};
}

std::pair<CMat, CMat> decompose_bk(const CMat& g) {
    // g = b k  <=>  J g^T J = (J k^T J)(J b^T J), which is a kb problem.
    const int m = static_cast<int>(g.rows());
    const CMat j = reversal(m);
    const MasterPoint p = decompose_kb(j * g.transpose() * j);
    CMat k = j * p.k.transpose() * j;
    CMat b = j * p.b.transpose() * j;
    return {b, k};
}

std::pair<CMat, CMat> dress_right(const CMat& b, const CMat& f) {
    const int m = static_cast<int>(b.rows());
    if ((f.adjoint() * f - CMat::Identity(m, m)).norm() > 1e-8)
        throw std::invalid_argument("dress_right: f is not unitary");
    if (!is_block_diagonal(f, 1e-8))
        throw std::invalid_argument("dress_right: f is not block diagonal");

    const MasterPoint p = decompose_kb(b * f.adjoint());
    CMat f_tilde = p.k.adjoint();
    if (!is_block_diagonal(f_tilde, 1e-8))
        throw std::logic_error("dress_right: dressed factor left K_+");
    return {f_tilde, p.b};
}

ObservableTriple observables(const MasterPoint& p, const CVec& w_hat) {
    const int m = static_cast<int>(p.k.rows());
    const CMat sig = signature_matrix(m);
    if ((sig * w_hat - w_hat).norm() > 1e-12)
        throw BadWHat("observables: I w_hat != w_hat");

    ObservableTriple t;
    t.Omega = p.b * p.b.adjoint();
    t.L = p.k.adjoint() * sig * p.k * sig;
    t.w = p.k.adjoint() * w_hat;
    return t;
}

// --------------------------- Lie-algebra layer -----------------------------

double pairing(const CMat& x, const CMat& y) {
    return (x * y).trace().imag();
}

std::pair<CMat, CMat> lie_project(const CMat& x) {
    const int m = static_cast<int>(x.rows());
    CMat xk = CMat::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        for (int i = j + 1; i < m; ++i) {
            xk(i, j) = x(i, j);            // strictly lower part is all k
            xk(j, i) = -std::conj(x(i, j));
        }
        xk(j, j) = Complex(0.0, x(j, j).imag());
    }
    return {xk, x - xk};
}

CMat r_operator(const CMat& x) {
    auto [xk, xb] = lie_project(x);
    return 0.5 * (xk - xb);
}

LieAlgebraBasis::LieAlgebraBasis(int two_n) : two_n_(two_n) {
    const int m = two_n;
    // Hermitian/anti-Hermitian elementary pairs plus Cartan directions.
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            CMat s = CMat::Zero(m, m), a = CMat::Zero(m, m);
            s(i, j) = s(j, i) = 1.0;
            a(i, j) = 1.0;
            a(j, i) = -1.0;
            elements_.push_back(s);
            elements_.push_back(a);
            elements_.push_back(Complex(0, 1) * s);
            elements_.push_back(Complex(0, 1) * a);
        }
    }
    for (int i = 0; i + 1 < m; ++i) {
        CMat d = CMat::Zero(m, m);
        d(i, i) = 1.0;
        d(i + 1, i + 1) = -1.0;
        elements_.push_back(d);
        elements_.push_back(Complex(0, 1) * d);
    }

    const int dim = static_cast<int>(elements_.size());
    RMat gram(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b)
            gram(a, b) = gram(b, a) = pairing(elements_[a], elements_[b]);
    gram_lu_.compute(gram);
}

CMat LieAlgebraBasis::from_pairings(const RVec& r) const {
    const RVec c = gram_lu_.solve(r);
    CMat x = CMat::Zero(two_n_, two_n_);
    for (int a = 0; a < dimension(); ++a) x += c[a] * elements_[a];
    return x;
}

GradientPair gradients(const GroupFunction& f, const CMat& g,
                       const LieAlgebraBasis& basis, double step) {
    if (step <= 0.0) throw std::invalid_argument("gradients: step must be positive");
    const int dim = basis.dimension();
    RVec dleft(dim), dright(dim);
    for (int a = 0; a < dim; ++a) {
        const CMat probe = step * basis.elements()[a];
        const CMat ep = expm_small(probe);
        const CMat em = expm_small(-probe);
        dleft[a] = (f(ep * g) - f(em * g)) / (2.0 * step);
        dright[a] = (f(g * ep) - f(g * em)) / (2.0 * step);
    }
    return {basis.from_pairings(dleft), basis.from_pairings(dright)};
}

double poisson_bracket(const GroupFunction& f, const GroupFunction& h,
                       const CMat& g, const LieAlgebraBasis& basis, double step) {
    const GradientPair df = gradients(f, g, basis, step);
    const GradientPair dh = gradients(h, g, basis, step);
    return pairing(df.left, r_operator(dh.left)) +
           pairing(df.right, r_operator(dh.right));
}

// --------------------------- free Hamiltonians -----------------------------

double free_hamiltonian(FlowFamily family, int l, const ObservableTriple& t) {
    if (l < 1) throw std::invalid_argument("free_hamiltonian: l must be >= 1");
    const CMat& m = (family == FlowFamily::F) ? t.Omega : t.L;
    const Complex tr = matrix_power(m, l).trace();
    if (std::abs(tr.imag()) > 1e-8)
        throw NonRealTrace("free_hamiltonian: trace has imaginary part " +
                           std::to_string(tr.imag()));
    return tr.real() / (2.0 * l);
}

GroupFunction free_hamiltonian_on_group(FlowFamily family, int l) {
    return [family, l](const CMat& g) {
        const MasterPoint p = decompose_kb(g);
        const int m = static_cast<int>(g.rows());
        const CMat sig = signature_matrix(m);
        const CMat obs = (family == FlowFamily::F)
                             ? CMat(p.b * p.b.adjoint())
                             : CMat(p.k.adjoint() * sig * p.k * sig);
        return matrix_power(obs, l).trace().real() / (2.0 * l);
    };
}

TripleDerivative triple_vector_field(FlowFamily family, int l,
                                     const ObservableTriple& t) {
    const int m = t.size();
    const CMat sig = signature_matrix(m);
    const Complex iu(0.0, 1.0);
    TripleDerivative d;

    if (family == FlowFamily::F) {
        const CMat omega_l = matrix_power(t.Omega, l);
        const double nu = omega_l.trace().real() / m;
        const CMat li = t.L * sig;
        d.dOmega = CMat::Zero(m, m);
        d.dL = (li * (iu * omega_l) - (iu * omega_l) * li) * sig;
        d.dw = -iu * (omega_l - nu * CMat::Identity(m, m)) * t.w;
        return d;
    }

    const CMat l_pow = matrix_power(t.L, l);
    const CMat l_prev = matrix_power(t.L, l - 1);
    const CMat l_next = l_pow * t.L;
    const CMat id = CMat::Identity(m, m);
    const CMat comb = 2.0 * l_pow - l_prev - l_next;
    d.dL = 0.5 * iu * (comb * sig - sig * comb);
    d.dOmega = 0.5 * iu * (id + sig) * l_pow * (id - sig) * t.Omega +
               0.5 * iu * t.Omega * (id - sig) * l_pow * (id + sig);
    d.dw = 0.5 * iu * (id + sig) * (l_pow - l_prev) * t.w;
    return d;
}

// --------------------------------- flows -----------------------------------

ObservableTriple exact_F_flow(const ObservableTriple& t0, int l, double time) {
    const int m = t0.size();
    const CMat sig = signature_matrix(m);
    const CMat omega_l = matrix_power(t0.Omega, l);
    const double nu = omega_l.trace().real() / m;

    Eigen::SelfAdjointEigenSolver<CMat> es(omega_l);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("exact_F_flow: eigensolver failed");
    CVec phases(m);
    for (int i = 0; i < m; ++i)
        phases[i] = std::exp(Complex(0.0, -time * (es.eigenvalues()[i] - nu)));
    const CMat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    if ((u.adjoint() * u - CMat::Identity(m, m)).norm() > 1e-10)
        throw std::logic_error("exact_F_flow: propagator lost unitarity");

    ObservableTriple out;
    out.Omega = t0.Omega;
    out.L = u * (t0.L * sig) * u.adjoint() * sig;
    out.w = u * t0.w;
    return out;
}

namespace {

ObservableTriple axpy(const ObservableTriple& t, double c, const TripleDerivative& d) {
    ObservableTriple out;
    out.Omega = t.Omega + c * d.dOmega;
    out.L = t.L + c * d.dL;
    out.w = t.w + c * d.dw;
    return out;
}

ObservableTriple rk4_phi_step(const ObservableTriple& t, int l, double dt) {
    const TripleDerivative k1 = triple_vector_field(FlowFamily::Phi, l, t);
    const TripleDerivative k2 = triple_vector_field(FlowFamily::Phi, l, axpy(t, 0.5 * dt, k1));
    const TripleDerivative k3 = triple_vector_field(FlowFamily::Phi, l, axpy(t, 0.5 * dt, k2));
    const TripleDerivative k4 = triple_vector_field(FlowFamily::Phi, l, axpy(t, dt, k3));
    ObservableTriple out;
    out.Omega = t.Omega + (dt / 6.0) * (k1.dOmega + 2.0 * k2.dOmega + 2.0 * k3.dOmega + k4.dOmega);
    out.L = t.L + (dt / 6.0) * (k1.dL + 2.0 * k2.dL + 2.0 * k3.dL + k4.dL);
    out.w = t.w + (dt / 6.0) * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
    return out;
}

}  // namespace

TripleTrajectory integrate_Phi_flow(const ObservableTriple& t0, int l,
                                    double t_end, double dt, double drift_guard) {
    if (dt <= 0.0) throw std::invalid_argument("integrate_Phi_flow: dt must be positive");
    if (t_end < 0.0) throw std::invalid_argument("integrate_Phi_flow: t_end must be >= 0");

    TripleTrajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(t0);
    if (t_end == 0.0) return traj;

    double phi_ref[3];
    for (int m = 1; m <= 3; ++m)
        phi_ref[m - 1] = free_hamiltonian(FlowFamily::Phi, m, t0);
    const double det_ref = t0.Omega.determinant().real();

    const long steps = std::lround(t_end / dt);
    ObservableTriple cur = t0;
    for (long s = 1; s <= steps; ++s) {
        cur = rk4_phi_step(cur, l, dt);
        const double t = static_cast<double>(s) * dt;
        for (int m = 1; m <= 3; ++m) {
            const double drift = std::abs(free_hamiltonian(FlowFamily::Phi, m, cur) - phi_ref[m - 1]);
            if (drift > drift_guard)
                throw StepTooLarge("integrate_Phi_flow: Phi_" + std::to_string(m) +
                                   " drift " + std::to_string(drift) + " at t=" + std::to_string(t));
        }
        const double det_drift = std::abs(cur.Omega.determinant().real() - det_ref);
        if (det_drift > drift_guard)
            throw StepTooLarge("integrate_Phi_flow: det Omega drift " +
                               std::to_string(det_drift) + " at t=" + std::to_string(t));
        traj.times.push_back(t);
        traj.states.push_back(cur);
    }
    return traj;
}

}  // namespace rsvd::matgroup
