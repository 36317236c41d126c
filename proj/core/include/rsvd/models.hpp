// Closed-form reduced Hamiltonians on both sides of the duality, their
// domains and gradients, and the scaled family with its rational limit.

#pragma once

#include <utility>

#include "rsvd/reduction.hpp"
#include "rsvd/types.hpp"

namespace rsvd::models {

using reduction::CouplingParams;
using reduction::ReducedPoint;

// Dual-side Darboux coordinates: phat positions, qhat angles.
struct DualPoint {
    RVec phat;
    RVec qhat;
};

/// The reduced Hamiltonian of the second free family in (lambda, theta):
///   V(lambda) + e^{v-u} sum_k cos(theta_k)/cosh^2(lambda_k) *
///     [1 - sinh^2 v / sinh^2 lambda_k]^{1/2} [1 - sinh^2 u / sinh^2 lambda_k]^{1/2} *
///     prod_{l != k} [1 - sinh^2 mu / sinh^2(lambda_k -+ lambda_l)]^{1/2}.
/// Throws DomainViolation on a negative radicand.
double ham_phi1_red(const ReducedPoint& rp, const CouplingParams& p);

/// Analytic partials (dH/dlambda, dH/dtheta); requires a point strictly
/// inside D_+^lambda.
std::pair<RVec, RVec> grad_phi1_red(const ReducedPoint& rp, const CouplingParams& p);

/// Action-side Hamiltonians sum_j cosh(2 l lambda_j) / l.
double actions_F_red(int l, const RVec& lambda);

/// Dual Hamiltonian in (phat, qhat):
///   U(phat) - sum_j cos(qhat_j) U1(phat_j)^{1/2} prod_{k != j} [...]^{1/2},
/// with U = (e^{-2u} + e^{2v})/2 sum_j e^{-2 phat_j}.
double ham_f1_dual(const DualPoint& dp, const CouplingParams& p);

/// U1 as the quadratic polynomial in e^{-2 phat}.
double u1_polynomial(double phat, const CouplingParams& p);

/// U1 as the product 4 e^{v-u} e^{-2 phat} sinh(phat) sinh(phat + u - v).
double u1_sinh_product(double phat, const CouplingParams& p);

/// Dual-side actions sum_j cos(2 l q_j) / l with sin(q_j) = e^{phat_j},
/// evaluated through the Chebyshev recurrence in cos(2q) = 1 - 2 e^{2 phat}.
double actions_phi_dual(int l, const RVec& phat);

/// Scaled family: r > 0 evaluates the hyperbolic Hamiltonian at
/// (r lambda; r u, r v, r mu); r = 0 evaluates the rational limit closed form.
double ham_rational(const ReducedPoint& rp, const CouplingParams& p, double r);

/// Potential of the rational limit, (uv/mu^2) [prod_k (1 - mu^2/lambda_k^2) - 1].
double rational_potential(const RVec& lambda, const CouplingParams& p);

}  // namespace rsvd::models
