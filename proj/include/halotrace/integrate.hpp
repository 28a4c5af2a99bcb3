// integrate.hpp: adaptive Prince-Dormand RK8(7) propagation of the CR3BP
// equations of motion, with state-transition-matrix and plane-crossing
// variants used by the differential corrector.

#ifndef HALOTRACE_INTEGRATE_HPP
#define HALOTRACE_INTEGRATE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "halotrace/cr3bp.hpp"

namespace halotrace {

struct IntegratorOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double initial_step = 1e-2;
    double min_step = 1e-14;           // below this the step-size control errors out
    std::size_t max_steps = 20'000'000;
};

/// Time-ordered list of states along one propagation.
struct Trajectory {
    std::vector<double> times;
    std::vector<State6> states;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    const State6& front_state() const { return states.front(); }
    const State6& back_state() const { return states.back(); }
};

/// Propagate over [t0, t1] (either direction), recording every accepted step.
Trajectory integrate(const State6& state0, double mu, double t0, double t1,
                     const IntegratorOptions& opts = {});

/// Propagate recording n_samples states on a uniform time grid over [t0, t1],
/// endpoints included; steps are clipped so grid times are hit exactly.
Trajectory integrate_sampled(const State6& state0, double mu, double t0, double t1,
                             int n_samples, const IntegratorOptions& opts = {});

/// Propagate and return only the final state.
State6 integrate_to(const State6& state0, double mu, double t0, double t1,
                    const IntegratorOptions& opts = {});

/// Row-major 6x6 state transition matrix.
using Mat6 = std::array<double, 36>;

struct StmResult {
    State6 state;
    Mat6 stm;
};

/// Propagate state and STM (initialized to identity at t0) to t1.
StmResult integrate_with_stm(const State6& state0, double mu, double t0, double t1,
                             const IntegratorOptions& opts = {});

struct PlaneCrossing {
    double t;
    State6 state;
};

/// First y = 0 crossing strictly after the state departs the plane, searched
/// forward from t0 and refined to ~1e-14 in time. Throws ConvergenceError if
/// none is found before t_max.
PlaneCrossing find_y_plane_crossing(const State6& state0, double mu, double t0,
                                    double t_max, const IntegratorOptions& opts = {});

}  // namespace halotrace

#endif
