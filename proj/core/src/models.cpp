#include "rsvd/models.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace rsvd::models {

namespace {

double sqrt_or_throw(double radicand, const char* where) {
    if (radicand < 0.0)
        throw DomainViolation(std::string(where) + ": negative radicand " +
                              std::to_string(radicand));
    return std::sqrt(radicand);
}

// [1 - sinh^2 c / sinh^2 t]^{1/2}; boundary zeros come out exact.
double sinh_ratio_factor(double c, double t, const char* where) {
    const double sc = std::sinh(c);
    const double st = std::sinh(t);
    return sqrt_or_throw(1.0 - (sc * sc) / (st * st), where);
}

// d/dt log of (1 - sinh^2 c / sinh^2 t)^{1/2}; valid away from zeros.
double sinh_ratio_log_deriv(double c, double t) {
    const double sc2 = std::sinh(c) * std::sinh(c);
    const double st = std::sinh(t);
    return sc2 * std::cosh(t) / (st * (st * st - sc2));
}

// cos(theta_k) coefficient f_k(lambda) of the hyperbolic Hamiltonian.
double cosine_coefficient(int k, const RVec& lambda, const CouplingParams& p) {
    const double lk = lambda[k];
    const double ch = std::cosh(lk);
    double f = std::exp(p.v - p.u) / (ch * ch);
    f *= sinh_ratio_factor(p.v, lk, "ham_phi1_red");
    f *= sinh_ratio_factor(p.u, lk, "ham_phi1_red");
    for (int l = 0; l < lambda.size(); ++l) {
        if (l == k) continue;
        f *= sinh_ratio_factor(p.mu, lk - lambda[l], "ham_phi1_red");
        f *= sinh_ratio_factor(p.mu, lk + lambda[l], "ham_phi1_red");
    }
    return f;
}

double potential(const RVec& lambda, const CouplingParams& p) {
    const int n = static_cast<int>(lambda.size());
    const double smu2 = std::sinh(p.mu) * std::sinh(p.mu);
    double prod_minus = 1.0, prod_plus = 1.0;
    for (int k = 0; k < n; ++k) {
        const double sl = std::sinh(lambda[k]);
        const double cl = std::cosh(lambda[k]);
        prod_minus *= 1.0 - smu2 / (sl * sl);
        prod_plus *= 1.0 + smu2 / (cl * cl);
    }
    const double c = n * std::exp(p.u - p.v) + std::cosh(p.v - p.u) / smu2;
    return std::exp(p.v - p.u) *
           (std::sinh(p.v) * std::sinh(p.u) / smu2 * prod_minus -
            std::cosh(p.v) * std::cosh(p.u) / smu2 * prod_plus + c);
}

}  // namespace

double ham_phi1_red(const ReducedPoint& rp, const CouplingParams& p) {
    double h = potential(rp.lambda, p);
    for (int k = 0; k < rp.lambda.size(); ++k)
        h += cosine_coefficient(k, rp.lambda, p) * std::cos(rp.theta[k]);
    return h;
}

std::pair<RVec, RVec> grad_phi1_red(const ReducedPoint& rp, const CouplingParams& p) {
    const int n = static_cast<int>(rp.lambda.size());
    const reduction::DomainReport dom =
        reduction::domain_check(reduction::DomainKind::Lambda, rp.lambda, p);
    if (!dom.ok) throw DomainViolation("grad_phi1_red: " + dom.first_violation);

    const RVec& lam = rp.lambda;
    std::vector<double> f(n);
    for (int k = 0; k < n; ++k) f[k] = cosine_coefficient(k, lam, p);

    RVec dtheta(n);
    for (int j = 0; j < n; ++j) dtheta[j] = -f[j] * std::sin(rp.theta[j]);

    const double smu2 = std::sinh(p.mu) * std::sinh(p.mu);

    // dV/dlambda_j via the product rule; the bracket 1 - sinh^2 mu / sinh^2
    // lambda_j may vanish inside the domain, so no log-derivative here.
    RVec dlambda = RVec::Zero(n);
    const double a_coef = std::exp(p.v - p.u) * std::sinh(p.v) * std::sinh(p.u) / smu2;
    const double b_coef = std::exp(p.v - p.u) * std::cosh(p.v) * std::cosh(p.u) / smu2;
    for (int j = 0; j < n; ++j) {
        double prod_minus_rest = 1.0, prod_plus_rest = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double sl = std::sinh(lam[k]);
            const double cl = std::cosh(lam[k]);
            prod_minus_rest *= 1.0 - smu2 / (sl * sl);
            prod_plus_rest *= 1.0 + smu2 / (cl * cl);
        }
        const double sj = std::sinh(lam[j]);
        const double cj = std::cosh(lam[j]);
        const double d_minus = 2.0 * smu2 * cj / (sj * sj * sj);
        const double d_plus = -2.0 * smu2 * sj / (cj * cj * cj);
        dlambda[j] += a_coef * prod_minus_rest * d_minus - b_coef * prod_plus_rest * d_plus;
    }

    // Cosine terms: interior points keep every factor of f_k strictly
    // positive, so log-derivatives are safe.
    for (int k = 0; k < n; ++k) {
        const double ck = std::cos(rp.theta[k]);
        if (f[k] == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            double dlog;
            if (j == k) {
                dlog = -2.0 * std::tanh(lam[k]) +
                       sinh_ratio_log_deriv(p.v, lam[k]) +
                       sinh_ratio_log_deriv(p.u, lam[k]);
                for (int l = 0; l < n; ++l) {
                    if (l == k) continue;
                    dlog += sinh_ratio_log_deriv(p.mu, lam[k] - lam[l]);
                    dlog += sinh_ratio_log_deriv(p.mu, lam[k] + lam[l]);
                }
            } else {
                dlog = -sinh_ratio_log_deriv(p.mu, lam[k] - lam[j]) +
                       sinh_ratio_log_deriv(p.mu, lam[k] + lam[j]);
            }
            dlambda[j] += f[k] * dlog * ck;
        }
    }
    return {dlambda, dtheta};
}

double actions_F_red(int l, const RVec& lambda) {
    double s = 0.0;
    for (int j = 0; j < lambda.size(); ++j) s += std::cosh(2.0 * l * lambda[j]);
    return s / l;
}

double u1_polynomial(double phat, const CouplingParams& p) {
    const double e2 = std::exp(-2.0 * phat);
    const double g = std::exp(2.0 * (p.v - p.u));
    return 1.0 - (1.0 + g) * e2 + g * e2 * e2;
}

double u1_sinh_product(double phat, const CouplingParams& p) {
    return 4.0 * std::exp(p.v - p.u) * std::exp(-2.0 * phat) * std::sinh(phat) *
           std::sinh(phat + p.u - p.v);
}

double ham_f1_dual(const DualPoint& dp, const CouplingParams& p) {
    const int n = static_cast<int>(dp.phat.size());
    double u_term = 0.0;
    for (int j = 0; j < n; ++j) u_term += std::exp(-2.0 * dp.phat[j]);
    u_term *= 0.5 * (std::exp(-2.0 * p.u) + std::exp(2.0 * p.v));

    double h = u_term;
    for (int j = 0; j < n; ++j) {
        double amp = sqrt_or_throw(u1_polynomial(dp.phat[j], p), "ham_f1_dual");
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            amp *= sinh_ratio_factor(p.mu, dp.phat[j] - dp.phat[k], "ham_f1_dual");
        }
        h -= std::cos(dp.qhat[j]) * amp;
    }
    return h;
}

double actions_phi_dual(int l, const RVec& phat) {
    double s = 0.0;
    for (int j = 0; j < phat.size(); ++j) {
        const double e2 = std::exp(2.0 * phat[j]);
        if (e2 > 1.0)
            throw DomainViolation("actions_phi_dual: e^{phat} exceeds 1 at entry " +
                                  std::to_string(j + 1));
        const double c1 = 1.0 - 2.0 * e2;  // cos(2q)
        double t_prev = 1.0, t_cur = c1;
        for (int m = 2; m <= l; ++m) {
            const double t_next = 2.0 * c1 * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
        }
        s += (l >= 1) ? t_cur : 1.0;
    }
    return s / l;
}

double rational_potential(const RVec& lambda, const CouplingParams& p) {
    const double c = p.u * p.v / (p.mu * p.mu);
    double prod = 1.0;
    for (int k = 0; k < lambda.size(); ++k)
        prod *= 1.0 - (p.mu * p.mu) / (lambda[k] * lambda[k]);
    return c * prod - c;
}

namespace {

// [1 - c^2 / t^2]^{1/2} with the boundary zero exact.
double ratio_factor(double c, double t, const char* where) {
    return sqrt_or_throw(1.0 - (c * c) / (t * t), where);
}

double rational_limit(const ReducedPoint& rp, const CouplingParams& p) {
    const int n = static_cast<int>(rp.lambda.size());
    double h = rational_potential(rp.lambda, p);
    for (int k = 0; k < n; ++k) {
        const double lk = rp.lambda[k];
        double f = ratio_factor(p.v, lk, "ham_rational");
        f *= ratio_factor(p.u, lk, "ham_rational");
        for (int l = 0; l < n; ++l) {
            if (l == k) continue;
            f *= ratio_factor(p.mu, lk - rp.lambda[l], "ham_rational");
            f *= ratio_factor(p.mu, lk + rp.lambda[l], "ham_rational");
        }
        h += std::cos(rp.theta[k]) * f;
    }
    return h;
}

}  // namespace

double ham_rational(const ReducedPoint& rp, const CouplingParams& p, double r) {
    if (r < 0.0) throw std::invalid_argument("ham_rational: r must be >= 0");
    if (r == 0.0) return rational_limit(rp, p);
    const CouplingParams scaled =
        reduction::build_params(p.n, r * p.u, r * p.v, r * p.mu);
    const ReducedPoint rp_scaled{r * rp.lambda, rp.theta};
    return ham_phi1_red(rp_scaled, scaled);
}

}  // namespace rsvd::models
