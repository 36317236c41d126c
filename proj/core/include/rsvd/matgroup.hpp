// Complex matrix-group layer: Iwasawa-type factorizations of SL(2n,C),
// the dressing action, the observable triple (Omega, L, w), the Im-trace
// pairing on sl(2n,C), finite-difference gradients and the associated
// Poisson bracket, the two families of free Hamiltonians and their flows.

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rsvd/errors.hpp"
#include "rsvd/types.hpp"

namespace rsvd::matgroup {

// ----------------------------- domain types --------------------------------

// Factor pair of g = k b: k unitary with det 1, b upper triangular with
// real positive diagonal and det 1.
struct MasterPoint {
    CMat k;
    CMat b;
};

// (Omega, L, w): Omega = b b^dag Hermitian positive with det 1,
// L = k^dag I k I quasi-Hermitian (L^dag = I L I, and L is unitary),
// w = k^dag w_hat.
struct ObservableTriple {
    CMat Omega;
    CMat L;
    CVec w;

    int size() const { return static_cast<int>(Omega.rows()); }
};

struct TripleDerivative {
    CMat dOmega;
    CMat dL;
    CVec dw;
};

enum class FlowFamily { F, Phi };

// -------------------------- decompositions ---------------------------------

/// g = k b with k unitary and b upper triangular, positive diagonal.
/// Two-pass Gram-Schmidt; the pair is unique. Throws SingularInput on
/// numerically rank-deficient input.
MasterPoint decompose_kb(const CMat& g);

/// g = b_L k_R, the mirrored factorization. Returns (b_L, k_R).
std::pair<CMat, CMat> decompose_bk(const CMat& g);

/// Dressing: for b in B and f in K_+ returns (f_tilde, b') with
/// f_tilde b f^dag = b' in B; f in K_+ forces f_tilde in K_+.
std::pair<CMat, CMat> dress_right(const CMat& b, const CMat& f);

/// Observable triple of a master point. Requires I w_hat = w_hat.
ObservableTriple observables(const MasterPoint& p, const CVec& w_hat);

// ------------------------- Lie-algebra layer -------------------------------

/// Im tr(XY), the invariant real pairing on sl(2n,C).
double pairing(const CMat& x, const CMat& y);

/// Split X = X_k + X_b with X_k anti-Hermitian and X_b upper triangular
/// with real diagonal. The splitting is unique and linear.
std::pair<CMat, CMat> lie_project(const CMat& x);

/// R = (P_k - P_b)/2 applied to X.
CMat r_operator(const CMat& x);

// Fixed real basis of sl(2n,C) with the Gram matrix of the pairing
// factorized once; used to reconstruct gradients from directional
// derivatives.
class LieAlgebraBasis {
  public:
    explicit LieAlgebraBasis(int two_n);

    int dimension() const { return static_cast<int>(elements_.size()); }
    int matrix_size() const { return two_n_; }
    const std::vector<CMat>& elements() const { return elements_; }

    // Solve <E_a, X> = r_a for X in the Lie algebra.
    CMat from_pairings(const RVec& r) const;

  private:
    int two_n_;
    std::vector<CMat> elements_;
    Eigen::PartialPivLU<RMat> gram_lu_;
};

using GroupFunction = std::function<double(const CMat&)>;

struct GradientPair {
    CMat left;   // nabla_g f
    CMat right;  // nabla'_g f
};

/// Left/right gradients of f at g from central differences over the basis,
/// resolved through the cached Gram factorization.
GradientPair gradients(const GroupFunction& f, const CMat& g,
                       const LieAlgebraBasis& basis, double step = 1e-5);

/// Heisenberg-double bracket {f, h}(g) = <Df, R Dh> + <D'f, R D'h>.
double poisson_bracket(const GroupFunction& f, const GroupFunction& h,
                       const CMat& g, const LieAlgebraBasis& basis,
                       double step = 1e-5);

// ------------------------- free Hamiltonians -------------------------------

/// F_l = tr(Omega^l)/(2l) or Phi_l = tr(L^l)/(2l). The trace must be real;
/// throws NonRealTrace past 1e-8.
double free_hamiltonian(FlowFamily family, int l, const ObservableTriple& t);

/// Same Hamiltonians as scalar functions on the group, evaluated through
/// the k b factorization.
GroupFunction free_hamiltonian_on_group(FlowFamily family, int l);

/// Time derivative of (Omega, L, w) under the flow of F_l or Phi_l.
TripleDerivative triple_vector_field(FlowFamily family, int l,
                                     const ObservableTriple& t);

// ------------------------------- flows -------------------------------------

/// Exact F_l flow: Omega is frozen, w and L I are propagated by the
/// unitary exp(-i t (Omega^l - nu_l id)) with nu_l = tr(Omega^l)/(2n).
ObservableTriple exact_F_flow(const ObservableTriple& t0, int l, double time);

struct TripleTrajectory {
    std::vector<double> times;
    std::vector<ObservableTriple> states;
};

/// Fixed-step RK4 integration of the Phi_l flow on the triple. Conservation
/// of Phi_1..Phi_3 and det Omega is monitored each step; drift beyond
/// drift_guard raises StepTooLarge.
TripleTrajectory integrate_Phi_flow(const ObservableTriple& t0, int l,
                                    double t_end, double dt,
                                    double drift_guard = 1e-6);

}  // namespace rsvd::matgroup
