// Canonical integration of the reduced Hamiltonians and the two flagship
// experiments: the dynamical Darboux check (unreduced triple flow against
// the canonical flow in (lambda, theta)) and the action-angle linearity
// check along the exact F_l flow.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rsvd/matgroup.hpp"
#include "rsvd/models.hpp"
#include "rsvd/reduction.hpp"
#include "rsvd/types.hpp"

namespace rsvd::dynamics {

using reduction::CouplingParams;
using reduction::ReducedPoint;

// A reduced Hamiltonian packaged with its gradient.
struct CanonicalHamiltonian {
    std::function<double(const ReducedPoint&)> value;
    // returns (dH/dlambda, dH/dtheta)
    std::function<std::pair<RVec, RVec>(const ReducedPoint&)> grad;
};

CanonicalHamiltonian make_phi1_hamiltonian(const CouplingParams& p);
CanonicalHamiltonian make_action_hamiltonian(int l);
// Dual-side Hamiltonian in (phat, qhat); gradient by central differences.
CanonicalHamiltonian make_dual_hamiltonian(const CouplingParams& p, double fd_step = 1e-6);

// Sign convention fixed by {theta_j, lambda_l} = delta_jl:
//   lambda_dot = -dH/dtheta,  theta_dot = +dH/dlambda.
std::pair<RVec, RVec> canonical_rhs(const CanonicalHamiltonian& h, const ReducedPoint& rp);

enum class Method { Rk4, StormerSplit };

struct Trajectory {
    std::vector<double> times;
    std::vector<ReducedPoint> states;
    std::vector<std::pair<std::string, std::vector<double>>> monitors;
};

/// Fixed-step integration; t_end < 0 integrates backwards. The trajectory
/// aborts with DomainExit(t) if the state leaves D_+^lambda (the domain
/// check uses the coupling parameters; pass check_domain = false to
/// integrate coordinates without one, e.g. on the dual side).
Trajectory integrate_canonical(const CanonicalHamiltonian& h, const ReducedPoint& rp0,
                               const CouplingParams& p, double t_end, double dt,
                               Method method = Method::Rk4, bool check_domain = true);

struct DarbouxReport {
    double max_lambda_dev = 0.0;
    double max_theta_dev = 0.0;          // angle-wrapped difference
    double max_constraint_residual = 0.0;
    long steps = 0;
};

/// Integrates the unreduced Phi_1 triple flow from the reconstructed
/// point, extracts (lambda, theta) each step, and compares against the
/// canonical flow of the reduced Hamiltonian started at the same point.
/// flip_sign_for_validation negates the canonical vector field; it exists
/// as a negative control and must make the comparison fail.
DarbouxReport darboux_experiment(const ReducedPoint& rp0, const CouplingParams& p,
                                 double t_end, double dt,
                                 bool flip_sign_for_validation = false);

struct DualityReport {
    int l = 1;
    RVec slopes;                 // 2 sinh(2 l lambda_j)
    double max_lambda_dev = 0.0;
    double max_theta_dev = 0.0;  // deviation from linear flow, mod 2 pi
};

/// Runs the exact F_l flow from the reconstructed point and checks that
/// lambda stays put while each theta_j advances linearly at slope
/// 2 sinh(2 l lambda_j).
DualityReport duality_experiment(const ReducedPoint& rp0, const CouplingParams& p,
                                 int l, double t_end, int samples = 64);

struct ConservationRow {
    std::string name;
    double max_drift = 0.0;
    double drift_rate = 0.0;  // max drift / elapsed time
};

template <class State>
struct NamedFunction {
    std::string name;
    std::function<double(const State&)> fn;
};

template <class State>
std::vector<ConservationRow> conservation_report(
    const std::vector<double>& times, const std::vector<State>& states,
    const std::vector<NamedFunction<State>>& functions) {
    std::vector<ConservationRow> rows;
    if (states.empty()) return rows;
    const double elapsed = times.back() - times.front();
    for (const auto& f : functions) {
        const double ref = f.fn(states.front());
        double max_drift = 0.0;
        for (const auto& s : states)
            max_drift = std::max(max_drift, std::abs(f.fn(s) - ref));
        rows.push_back({f.name, max_drift,
                        elapsed > 0.0 ? max_drift / elapsed : 0.0});
    }
    return rows;
}

/// Continuity-based unwrapping of an angle sequence; a step jump beyond
/// pi/2 aborts with std::runtime_error instead of silently unwrapping.
std::vector<double> unwrap_angles(const std::vector<double>& wrapped);

}  // namespace rsvd::dynamics
