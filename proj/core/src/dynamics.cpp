#include "rsvd/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace rsvd::dynamics {

CanonicalHamiltonian make_phi1_hamiltonian(const CouplingParams& p) {
    CanonicalHamiltonian h;
    h.value = [p](const ReducedPoint& rp) { return models::ham_phi1_red(rp, p); };
    h.grad = [p](const ReducedPoint& rp) { return models::grad_phi1_red(rp, p); };
    return h;
}

CanonicalHamiltonian make_action_hamiltonian(int l) {
    CanonicalHamiltonian h;
    h.value = [l](const ReducedPoint& rp) { return models::actions_F_red(l, rp.lambda); };
    h.grad = [l](const ReducedPoint& rp) {
        const int n = static_cast<int>(rp.lambda.size());
        RVec dlam(n);
        for (int j = 0; j < n; ++j) dlam[j] = 2.0 * std::sinh(2.0 * l * rp.lambda[j]);
        return std::make_pair(dlam, RVec(RVec::Zero(n)));
    };
    return h;
}

CanonicalHamiltonian make_dual_hamiltonian(const CouplingParams& p, double fd_step) {
    CanonicalHamiltonian h;
    auto eval = [p](const ReducedPoint& rp) {
        return models::ham_f1_dual({rp.lambda, rp.theta}, p);
    };
    h.value = eval;
    h.grad = [eval, fd_step](const ReducedPoint& rp) {
        const int n = static_cast<int>(rp.lambda.size());
        RVec dp(n), dq(n);
        for (int j = 0; j < n; ++j) {
            ReducedPoint up = rp, dn = rp;
            up.lambda[j] += fd_step;
            dn.lambda[j] -= fd_step;
            dp[j] = (eval(up) - eval(dn)) / (2.0 * fd_step);
            up = rp;
            dn = rp;
            up.theta[j] += fd_step;
            dn.theta[j] -= fd_step;
            dq[j] = (eval(up) - eval(dn)) / (2.0 * fd_step);
        }
        return std::make_pair(dp, dq);
    };
    return h;
}

std::pair<RVec, RVec> canonical_rhs(const CanonicalHamiltonian& h, const ReducedPoint& rp) {
    const auto [dlam, dth] = h.grad(rp);
    return {-dth, dlam};
}

namespace {

ReducedPoint rk4_step(const CanonicalHamiltonian& h, const ReducedPoint& s, double dt) {
    auto add = [](const ReducedPoint& a, double c, const std::pair<RVec, RVec>& d) {
        return ReducedPoint{a.lambda + c * d.first, a.theta + c * d.second};
    };
    const auto k1 = canonical_rhs(h, s);
    const auto k2 = canonical_rhs(h, add(s, 0.5 * dt, k1));
    const auto k3 = canonical_rhs(h, add(s, 0.5 * dt, k2));
    const auto k4 = canonical_rhs(h, add(s, dt, k3));
    ReducedPoint out;
    out.lambda = s.lambda + (dt / 6.0) * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
    out.theta = s.theta + (dt / 6.0) * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
    return out;
}

// Generalized Stormer-Verlet with q = theta, p = lambda; the two implicit
// half-stages are solved by fixed-point iteration.
ReducedPoint stormer_step(const CanonicalHamiltonian& h, const ReducedPoint& s, double dt) {
    const double half = 0.5 * dt;
    constexpr int kMaxIter = 12;
    constexpr double kFixTol = 1e-15;

    RVec p_half = s.lambda;
    for (int it = 0; it < kMaxIter; ++it) {
        const auto g = h.grad({p_half, s.theta});
        const RVec next = s.lambda - half * g.second;
        const double change = (next - p_half).norm();
        p_half = next;
        if (change < kFixTol) break;
    }

    const RVec dq0 = h.grad({p_half, s.theta}).first;
    RVec q_new = s.theta + dt * dq0;  // predictor
    for (int it = 0; it < kMaxIter; ++it) {
        const auto g = h.grad({p_half, q_new});
        const RVec next = s.theta + half * (dq0 + g.first);
        const double change = (next - q_new).norm();
        q_new = next;
        if (change < kFixTol) break;
    }

    const RVec p_new = p_half - half * h.grad({p_half, q_new}).second;
    return {p_new, q_new};
}

}  // namespace

Trajectory integrate_canonical(const CanonicalHamiltonian& h, const ReducedPoint& rp0,
                               const CouplingParams& p, double t_end, double dt,
                               Method method, bool check_domain) {
    if (dt <= 0.0) throw std::invalid_argument("integrate_canonical: dt must be positive");

    Trajectory traj;
    traj.monitors.emplace_back("H", std::vector<double>{});
    auto push = [&](double t, const ReducedPoint& s) {
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.monitors[0].second.push_back(h.value(s));
    };

    push(0.0, rp0);
    if (t_end == 0.0) return traj;

    const double dir = (t_end > 0.0) ? 1.0 : -1.0;
    const double step = dir * dt;
    const long steps = std::lround(std::abs(t_end) / dt);
    ReducedPoint cur = rp0;
    for (long s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s) * step;
        try {
            cur = (method == Method::Rk4) ? rk4_step(h, cur, step)
                                          : stormer_step(h, cur, step);
        } catch (const DomainViolation& e) {
            throw DomainExit(t, "integrate_canonical: left the domain near t=" +
                                    std::to_string(t) + " (" + e.what() + ")");
        }
        if (check_domain) {
            const auto dom = reduction::domain_check(reduction::DomainKind::Lambda,
                                                     cur.lambda, p);
            if (!dom.ok)
                throw DomainExit(t, "integrate_canonical: left the domain at t=" +
                                        std::to_string(t) + ": " + dom.first_violation);
        }
        push(t, cur);
    }
    return traj;
}

DarbouxReport darboux_experiment(const ReducedPoint& rp0, const CouplingParams& p,
                                 double t_end, double dt,
                                 bool flip_sign_for_validation) {
    const matgroup::ObservableTriple t0 = reduction::reconstruct_point(rp0, p);
    const matgroup::TripleTrajectory master =
        matgroup::integrate_Phi_flow(t0, 1, t_end, dt);

    CanonicalHamiltonian ham = make_phi1_hamiltonian(p);
    if (flip_sign_for_validation) {
        const auto grad = ham.grad;
        ham.grad = [grad](const ReducedPoint& rp) {
            auto g = grad(rp);
            return std::make_pair(RVec(-g.first), RVec(-g.second));
        };
    }
    const Trajectory reduced = integrate_canonical(ham, rp0, p, t_end, dt);

    if (master.states.size() != reduced.states.size())
        throw std::logic_error("darboux_experiment: trajectory length mismatch");

    DarbouxReport rep;
    rep.steps = static_cast<long>(master.states.size()) - 1;
    for (std::size_t i = 0; i < master.states.size(); ++i) {
        const ReducedPoint got = reduction::extract_invariants(master.states[i], p);
        const ReducedPoint& want = reduced.states[i];
        for (int j = 0; j < p.n; ++j) {
            rep.max_lambda_dev = std::max(rep.max_lambda_dev,
                                          std::abs(got.lambda[j] - want.lambda[j]));
            rep.max_theta_dev = std::max(rep.max_theta_dev,
                                         std::abs(wrap_angle(got.theta[j] - want.theta[j])));
        }
        rep.max_constraint_residual =
            std::max(rep.max_constraint_residual,
                     reduction::main_constraint_residual(master.states[i], p).norm());
    }
    return rep;
}

DualityReport duality_experiment(const ReducedPoint& rp0, const CouplingParams& p,
                                 int l, double t_end, int samples) {
    if (samples < 1) throw std::invalid_argument("duality_experiment: samples must be >= 1");
    const matgroup::ObservableTriple t0 = reduction::reconstruct_point(rp0, p);
    const ReducedPoint base = reduction::extract_invariants(t0, p);

    DualityReport rep;
    rep.l = l;
    rep.slopes = RVec(p.n);
    for (int j = 0; j < p.n; ++j)
        rep.slopes[j] = 2.0 * std::sinh(2.0 * l * base.lambda[j]);

    for (int s = 0; s <= samples; ++s) {
        const double t = t_end * static_cast<double>(s) / samples;
        const matgroup::ObservableTriple moved = matgroup::exact_F_flow(t0, l, t);
        const ReducedPoint rp = reduction::extract_invariants(moved, p);
        for (int j = 0; j < p.n; ++j) {
            rep.max_lambda_dev = std::max(rep.max_lambda_dev,
                                          std::abs(rp.lambda[j] - base.lambda[j]));
            const double predicted = base.theta[j] + t * rep.slopes[j];
            rep.max_theta_dev = std::max(rep.max_theta_dev,
                                         std::abs(wrap_angle(rp.theta[j] - predicted)));
        }
    }
    return rep;
}

std::vector<double> unwrap_angles(const std::vector<double>& wrapped) {
    std::vector<double> out;
    out.reserve(wrapped.size());
    double offset = 0.0;
    for (std::size_t i = 0; i < wrapped.size(); ++i) {
        if (i > 0) {
            const double jump = wrapped[i] - wrapped[i - 1];
            double corrected = jump;
            if (jump > M_PI) {
                offset -= 2.0 * M_PI;
                corrected = jump - 2.0 * M_PI;
            } else if (jump < -M_PI) {
                offset += 2.0 * M_PI;
                corrected = jump + 2.0 * M_PI;
            }
            if (std::abs(corrected) > 0.5 * M_PI)
                throw std::runtime_error("unwrap_angles: step jump exceeds pi/2 at index " +
                                         std::to_string(i));
        }
        out.push_back(wrapped[i] + offset);
    }
    return out;
}

}  // namespace rsvd::dynamics
