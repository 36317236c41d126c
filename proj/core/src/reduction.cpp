#include "rsvd/reduction.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace rsvd::reduction {

namespace {

constexpr double kDegenerateTol = 1e-9;
constexpr double kOffSliceTol = 1e-6;

std::string ordinal(int i) { return std::to_string(i + 1); }

// Upper-triangular factor with positive diagonal of a Hermitian positive
// matrix: reverse-permuted Cholesky.
CMat upper_cholesky(const CMat& a) {
    const int m = static_cast<int>(a.rows());
    CMat j = CMat::Zero(m, m);
    for (int i = 0; i < m; ++i) j(i, m - 1 - i) = 1.0;
    Eigen::LLT<CMat> llt(j * a * j);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("upper_cholesky: matrix not positive definite");
    return j * CMat(llt.matrixL()) * j;
}

}  // namespace

// ------------------------------ build_params -------------------------------

CouplingParams build_params(int n, double u, double v, double mu,
                            const std::optional<CVec>& v_hat_direction) {
    if (mu <= 0.0) throw BadMu("build_params: mu must be positive");
    if (n < 1) throw std::invalid_argument("build_params: n must be >= 1");

    CouplingParams p;
    p.n = n;
    p.u = u;
    p.v = v;
    p.mu = mu;
    p.x = std::exp(-v);
    p.y = std::exp(-u);
    p.alpha = std::exp(-mu);

    const double r = p.alpha * std::sqrt(std::pow(p.alpha, -2 * n) - 1.0);
    CVec dir = CVec::Zero(n);
    if (v_hat_direction) {
        if (v_hat_direction->size() != n)
            throw std::invalid_argument("build_params: direction size mismatch");
        const double norm = v_hat_direction->norm();
        if (norm < 1e-14)
            throw std::invalid_argument("build_params: direction is null");
        dir = *v_hat_direction / norm;
    } else {
        dir[0] = 1.0;
    }
    p.v_hat = r * dir;

    p.w_hat = CVec::Zero(2 * n);
    p.w_hat.head(n) = p.v_hat;

    const CMat gram = p.alpha * p.alpha * CMat::Identity(n, n) +
                      p.v_hat * p.v_hat.adjoint();
    p.sigma = upper_cholesky(gram);

    // The norm condition on v_hat makes det sigma = 1; keep it honest.
    if (std::abs(p.sigma.determinant() - Complex(1.0, 0.0)) > 1e-8)
        throw std::logic_error("build_params: det sigma drifted from 1");
    return p;
}

// ------------------------------ constraints --------------------------------

CMat constraint_residual(ConstraintSide side, const CMat& g,
                         const CMat& block1, const CMat& block2) {
    const int m = static_cast<int>(g.rows());
    const int n = m / 2;
    CMat lhs;
    CMat mid = CMat::Zero(m, m);
    CMat rhs = CMat::Zero(m, m);

    if (side == ConstraintSide::Right) {
        lhs = g.adjoint() * g;
        mid.block(0, 0, n, n) = (block1.adjoint() * block1).inverse();
        rhs.block(n, n, n, n) = block2.adjoint() * block2;
    } else {
        lhs = g * g.adjoint();
        mid.block(n, n, n, n) = (block2 * block2.adjoint()).inverse();
        rhs.block(0, 0, n, n) = block1 * block1.adjoint();
    }
    return lhs - lhs * mid * lhs - rhs;
}

CMat main_constraint_residual(const matgroup::ObservableTriple& t,
                              const CouplingParams& p) {
    const int m = t.size();
    const CMat sig = signature_matrix(m);
    const CMat id = CMat::Identity(m, m);
    const CMat li = t.L * sig;
    const double y2 = p.y * p.y;
    const double a2 = p.alpha * p.alpha;
    return 2.0 * y2 * t.Omega - t.Omega * t.Omega + t.Omega * li * t.Omega -
           a2 * id - a2 * li - 2.0 * (t.w * t.w.adjoint());
}

// ----------------------------- spectral frame ------------------------------

namespace {

void require_strictly_decreasing(const RVec& vals, const char* label) {
    for (int i = 0; i + 1 < vals.size(); ++i)
        if (vals[i] - vals[i + 1] < kDegenerateTol)
            throw NonGenericSpectrum(std::string(label) + " entries " + ordinal(i) +
                                     " and " + ordinal(i + 1) + " are degenerate");
}

SpectralFrame frame_from_Lambda_checked(const RVec& Lambda, const CouplingParams& p) {
    const int n = static_cast<int>(Lambda.size());
    const double x2 = p.x * p.x;
    const double floor_val = std::max(x2, 1.0 / x2);
    require_strictly_decreasing(Lambda, "Lambda");
    if (Lambda[n - 1] <= floor_val)
        throw DomainViolation("spectral_frame: Lambda_" + ordinal(n - 1) +
                              " <= max(x^2, x^-2)");

    SpectralFrame f;
    f.Lambda = Lambda;
    f.beta = RVec(n);
    f.Gamma = RVec(n);
    f.Sigma = RVec(n);
    for (int i = 0; i < n; ++i) {
        const double li = Lambda[i];
        const double inv = 1.0 / li;
        f.beta[i] = std::sqrt(li + inv - x2 - 1.0 / x2);
        const double gap = li - inv;
        f.Gamma[i] = std::sqrt((li - 1.0 / x2) / gap);
        f.Sigma[i] = std::sqrt((1.0 / x2 - inv) / gap);
    }

    f.rho = RMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        f.rho(i, i) = f.Gamma[i];
        f.rho(i, n + i) = f.Sigma[i];
        f.rho(n + i, i) = f.Sigma[i];
        f.rho(n + i, n + i) = -f.Gamma[i];
    }
    return f;
}

}  // namespace

RVec SpectralFrame::lambda_full() const {
    const int n = static_cast<int>(Lambda.size());
    RVec full(2 * n);
    for (int i = 0; i < n; ++i) {
        full[i] = Lambda[i];
        full[n + i] = 1.0 / Lambda[i];
    }
    return full;
}

SpectralFrame spectral_frame_from_Lambda(const RVec& Lambda, const CouplingParams& p) {
    return frame_from_Lambda_checked(Lambda, p);
}

SpectralFrame spectral_frame_from_beta(const RVec& beta, const CouplingParams& p) {
    const int n = static_cast<int>(beta.size());
    require_strictly_decreasing(beta, "beta");
    if (beta[n - 1] <= 0.0)
        throw DomainViolation("spectral_frame: beta must be positive");

    const double x2 = p.x * p.x;
    RVec Lambda(n);
    for (int i = 0; i < n; ++i) {
        // Lambda + Lambda^{-1} = beta^2 + x^2 + x^{-2}; take the root above
        // max(x^2, x^{-2}).
        const double s = beta[i] * beta[i] + x2 + 1.0 / x2;
        Lambda[i] = 0.5 * (s + std::sqrt(s * s - 4.0));
    }
    return frame_from_Lambda_checked(Lambda, p);
}

// --------------------------------- moduli ----------------------------------

RVec moduli_oracle(const RVec& lambda_full, const CouplingParams& p) {
    const int m = static_cast<int>(lambda_full.size());
    const double a2 = p.alpha * p.alpha;
    const double y2 = p.y * p.y;

    RMat cauchy(m, m);
    RVec rhs(m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b)
            cauchy(a, b) = 1.0 / (lambda_full[a] * lambda_full[b] - a2);
        rhs[a] = (y2 * lambda_full[a] - a2) /
                 (lambda_full[a] * lambda_full[a] - a2);
    }

    Eigen::JacobiSVD<RMat> svd(cauchy, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues()[m - 1];
    const double smax = svd.singularValues()[0];
    if (smin <= 0.0 || smax / smin > 1e12)
        throw SingularCauchy("moduli_oracle: Cauchy system conditioning beyond 1e12");
    return svd.solve(rhs);
}

RVec moduli_closed_form(const RVec& lambda_full, const CouplingParams& p) {
    const int m = static_cast<int>(lambda_full.size());
    const double y2 = p.y * p.y;
    const double inv_a = 1.0 / p.alpha;

    RVec out(m);
    for (int a = 0; a < m; ++a) {
        double val = p.alpha * (lambda_full[a] - y2);
        for (int b = 0; b < m; ++b) {
            if (b == a) continue;
            val *= (inv_a * lambda_full[a] * lambda_full[b] - p.alpha) /
                   (lambda_full[a] - lambda_full[b]);
        }
        out[a] = val;
    }
    for (int a = 0; a < m; ++a)
        if (out[a] <= 0.0)
            throw DomainViolation("moduli_closed_form: |w_" + ordinal(a) +
                                  "|^2 = " + std::to_string(out[a]) +
                                  " is not positive (lambda outside D_+)");
    return out;
}

RVec moduli_split_form(const RVec& lambda, const CouplingParams& p) {
    const int n = static_cast<int>(lambda.size());
    const double y2 = p.y * p.y;
    const double emu = std::exp(-p.mu);
    const double smu = std::sinh(p.mu);

    RVec out(2 * n);
    for (int k = 0; k < n; ++k) {
        const double lk = lambda[k];
        double top = emu * (std::exp(2.0 * lk) - y2) * smu / std::sinh(2.0 * lk);
        double bot = emu * (y2 - std::exp(-2.0 * lk)) * smu / std::sinh(2.0 * lk);
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const double d = lk - lambda[i];
            const double s = lk + lambda[i];
            const double den = std::sinh(d) * std::sinh(s);
            top *= std::sinh(s + p.mu) * std::sinh(d + p.mu) / den;
            bot *= std::sinh(s - p.mu) * std::sinh(d - p.mu) / den;
        }
        out[k] = top;
        out[n + k] = bot;
    }
    return out;
}

// ------------------------- reconstruct / extract ---------------------------

matgroup::ObservableTriple reconstruct_point(const ReducedPoint& rp,
                                             const CouplingParams& p) {
    const int n = p.n;
    if (rp.lambda.size() != n || rp.theta.size() != n)
        throw std::invalid_argument("reconstruct_point: coordinate size mismatch");

    const DomainReport dom = domain_check(DomainKind::Lambda, rp.lambda, p);
    if (!dom.ok) throw DomainViolation("reconstruct_point: " + dom.first_violation);

    RVec Lambda(n);
    for (int i = 0; i < n; ++i) Lambda[i] = std::exp(2.0 * rp.lambda[i]);
    const SpectralFrame frame = spectral_frame_from_Lambda(Lambda, p);
    const RVec lam_full = frame.lambda_full();
    const RVec mod2 = moduli_closed_form(lam_full, p);

    // Gauge fixing: w_j real positive, the phase sits in w_{n+j}.
    const int m = 2 * n;
    CVec w_tilde(m);
    for (int j = 0; j < n; ++j) {
        w_tilde[j] = std::sqrt(mod2[j]);
        w_tilde[n + j] = std::sqrt(mod2[n + j]) *
                         std::exp(Complex(0.0, rp.theta[j]));
    }

    const double a2 = p.alpha * p.alpha;
    const double y2 = p.y * p.y;
    CMat q(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            Complex val = 2.0 * w_tilde[a] * std::conj(w_tilde[b]);
            if (a == b)
                val += lam_full[a] * lam_full[a] - 2.0 * y2 * lam_full[a] + a2;
            q(a, b) = val / (lam_full[a] * lam_full[b] - a2);
        }
    }

    const CMat rho = frame.rho.cast<Complex>();
    const CMat sig = signature_matrix(m);

    matgroup::ObservableTriple t;
    t.L = rho * q * rho * sig;
    t.w = rho * w_tilde;
    t.Omega = CMat::Zero(m, m);
    const double x2 = p.x * p.x;
    for (int i = 0; i < n; ++i) {
        t.Omega(i, i) = x2 + frame.beta[i] * frame.beta[i];
        t.Omega(i, n + i) = frame.beta[i] / p.x;
        t.Omega(n + i, i) = frame.beta[i] / p.x;
        t.Omega(n + i, n + i) = 1.0 / x2;
    }
    return t;
}

ReducedPoint extract_invariants(const matgroup::ObservableTriple& t,
                                const CouplingParams& p) {
    const int n = p.n;
    const int m = 2 * n;
    const double x2 = p.x * p.x;

    const CMat omega22 = t.Omega.block(n, n, n, n);
    const double slice_dev = (omega22 - (1.0 / x2) * CMat::Identity(n, n)).norm();
    if (slice_dev > kOffSliceTol)
        throw OffSlice("extract_invariants: Omega_22 deviates from x^-2 by " +
                       std::to_string(slice_dev));

    // Recover the evolving b_12 block and regauge it diagonal by SVD.
    const CMat b12 = p.x * t.Omega.block(0, n, n, n);
    Eigen::JacobiSVD<CMat> svd(b12, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVec beta = svd.singularValues();
    require_strictly_decreasing(beta, "beta");
    if (beta[n - 1] <= kDegenerateTol)
        throw NonGenericSpectrum("extract_invariants: smallest singular value vanishes");

    CMat gauge = CMat::Zero(m, m);
    gauge.block(0, 0, n, n) = svd.matrixU();
    gauge.block(n, n, n, n) = svd.matrixV();

    const SpectralFrame frame = spectral_frame_from_beta(beta, p);
    const CVec w_gauged = gauge.adjoint() * t.w;
    const CVec w_tilde = frame.rho.cast<Complex>() * w_gauged;

    ReducedPoint rp;
    rp.lambda = RVec(n);
    rp.theta = RVec(n);
    for (int j = 0; j < n; ++j) {
        rp.lambda[j] = 0.5 * std::log(frame.Lambda[j]);
        rp.theta[j] = std::arg(std::conj(w_tilde[j]) * w_tilde[n + j]);
    }
    return rp;
}

// --------------------------------- domains ---------------------------------

DomainReport domain_check(DomainKind kind, const RVec& point,
                          const CouplingParams& p) {
    const int n = static_cast<int>(point.size());
    std::ostringstream why;
    if (kind == DomainKind::Lambda) {
        const double floor_val = std::max(std::abs(p.u), std::abs(p.v));
        if (!(point[n - 1] > floor_val)) {
            why << "lambda_" << n << " = " << point[n - 1]
                << " must exceed max(|u|,|v|) = " << floor_val;
            return {false, why.str()};
        }
        for (int i = 0; i + 1 < n; ++i) {
            if (!(point[i] - point[i + 1] > p.mu)) {
                why << "lambda_" << (i + 1) << " - lambda_" << (i + 2) << " = "
                    << point[i] - point[i + 1] << " must exceed mu = " << p.mu;
                return {false, why.str()};
            }
        }
        return {true, ""};
    }

    const double ceil_val = std::min(0.0, p.v - p.u);
    if (!(point[0] < ceil_val)) {
        why << "phat_1 = " << point[0] << " must be below min(0, v-u) = " << ceil_val;
        return {false, why.str()};
    }
    for (int i = 0; i + 1 < n; ++i) {
        if (!(point[i] - point[i + 1] > p.mu)) {
            why << "phat_" << (i + 1) << " - phat_" << (i + 2) << " = "
                << point[i] - point[i + 1] << " must exceed mu = " << p.mu;
            return {false, why.str()};
        }
    }
    return {true, ""};
}

}  // namespace rsvd::reduction
