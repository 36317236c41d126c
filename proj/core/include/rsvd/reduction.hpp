// Reduction layer: coupling constants and the constraint data, the
// partial gauge fixing and spectral frame rho, the Cauchy-system moduli
// |w_tilde_a|^2 (dense solve and closed form), reconstruction of
// constrained triples from (lambda, theta), and the inverse extraction.

#pragma once

#include <optional>
#include <string>
#include <utility>

#include "rsvd/matgroup.hpp"
#include "rsvd/types.hpp"

namespace rsvd::reduction {

// ----------------------------- domain types --------------------------------

// Model constants. The derived quantities are fixed by (n, u, v, mu):
// x = e^{-v}, y = e^{-u}, alpha = e^{-mu} in (0,1),
// |v_hat|^2 = alpha^2 (alpha^{-2n} - 1), w_hat = (v_hat, 0),
// sigma sigma^dag = alpha^2 1_n + v_hat v_hat^dag with det sigma = 1.
struct CouplingParams {
    int n = 1;
    double u = 0.0;
    double v = 0.0;
    double mu = 0.0;

    double x = 1.0;
    double y = 1.0;
    double alpha = 1.0;
    CVec v_hat;   // n entries
    CVec w_hat;   // 2n entries, lower half zero
    CMat sigma;   // n x n upper triangular, positive diagonal
};

/// Build CouplingParams; v_hat points along v_hat_direction (default e_1)
/// with the norm forced by the constants. Throws BadMu for mu <= 0.
CouplingParams build_params(int n, double u, double v, double mu,
                            const std::optional<CVec>& v_hat_direction = std::nullopt);

// Diagonalization data of the gauge-fixed Omega:
// Lambda strictly decreasing above max(x^2, x^{-2}), beta the slice
// singular values, rho = [[Gamma, Sigma], [Sigma, -Gamma]] real symmetric
// orthogonal with Omega = rho diag(Lambda, Lambda^{-1}) rho.
struct SpectralFrame {
    RVec Lambda;  // n entries
    RVec beta;    // n entries
    RVec Gamma;   // n entries
    RVec Sigma;   // n entries
    RMat rho;     // 2n x 2n

    // (Lambda_1..Lambda_n, Lambda_1^{-1}..Lambda_n^{-1})
    RVec lambda_full() const;
};

/// Frame from the slice singular values beta (strictly decreasing, > 0).
SpectralFrame spectral_frame_from_beta(const RVec& beta, const CouplingParams& p);

/// Frame from eigenvalues Lambda (strictly decreasing, > max(x^2, x^{-2})).
SpectralFrame spectral_frame_from_Lambda(const RVec& Lambda, const CouplingParams& p);

// Darboux coordinates on the reduced space.
struct ReducedPoint {
    RVec lambda;
    RVec theta;
};

// ------------------------------ constraints --------------------------------

enum class ConstraintSide { Right, Left };

/// Residual of the momentum-constraint identity: zero iff the triangular
/// factor of g on the given side has the prescribed diagonal blocks.
CMat constraint_residual(ConstraintSide side, const CMat& g,
                         const CMat& block1, const CMat& block2);

/// Residual of the solved constraint on the triple:
/// 2 y^2 Omega - Omega^2 + Omega L I Omega - alpha^2 id - alpha^2 L I - 2 w w^dag.
CMat main_constraint_residual(const matgroup::ObservableTriple& t,
                              const CouplingParams& p);

// -------------------------------- moduli -----------------------------------

/// Brute-force moduli: dense solve of
///   sum_b |w_b|^2 / (Lambda_a Lambda_b - alpha^2) = (y^2 Lambda_a - alpha^2) / (Lambda_a^2 - alpha^2).
/// Throws SingularCauchy when the system matrix conditioning exceeds 1e12.
RVec moduli_oracle(const RVec& lambda_full, const CouplingParams& p);

/// Closed-form moduli
///   |w_a|^2 = alpha (Lambda_a - y^2) prod_{b != a} (alpha^{-1} Lambda_a Lambda_b - alpha) / (Lambda_a - Lambda_b).
/// Throws DomainViolation if any entry fails to be positive.
RVec moduli_closed_form(const RVec& lambda_full, const CouplingParams& p);

/// The same moduli through the hyperbolic split formulas in lambda,
/// entries (k, n+k) computed from sinh products. Input is lambda (n entries).
RVec moduli_split_form(const RVec& lambda, const CouplingParams& p);

// --------------------------- reconstruct / extract -------------------------

/// Constrained triple realizing (lambda, theta): moduli from the closed
/// form, phases w_j real positive and w_{n+j} carrying e^{i theta_j},
/// L = rho Q rho I, Omega from the slice form, w = rho w_tilde.
matgroup::ObservableTriple reconstruct_point(const ReducedPoint& rp,
                                             const CouplingParams& p);

/// Inverse map on the evolving slice: recover b_12 = x Omega_12, gauge by
/// the SVD frame, and read off lambda and theta. Throws OffSlice if
/// Omega_22 deviates from x^{-2} 1_n, NonGenericSpectrum on close singular
/// values.
ReducedPoint extract_invariants(const matgroup::ObservableTriple& t,
                                const CouplingParams& p);

// -------------------------------- domains ----------------------------------

enum class DomainKind { Lambda, PHat };

struct DomainReport {
    bool ok = false;
    std::string first_violation;  // empty when ok
};

/// Strict inequalities of D_+^lambda (lambda_n > max(|v|,|u|), gaps > mu)
/// or D_+^phat (phat_1 < min(0, v-u), gaps > mu).
DomainReport domain_check(DomainKind kind, const RVec& point,
                          const CouplingParams& p);

}  // namespace rsvd::reduction
