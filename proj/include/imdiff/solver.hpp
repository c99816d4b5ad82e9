#pragma once

#include <optional>
#include <vector>

#include "imdiff/problem.hpp"
#include "imdiff/schedule.hpp"

namespace imdiff {

// State of the lifted iteration X_k = (x_k, z_k) in R^{2n}, where z_k = x_{k-1}.
struct LiftedState {
    Vec x;
    Vec z;
};

// One inertial step applied to the lifted state:
//   y_a = x + a_k (x - z),  y_b = x + b_k (x - z),
//   next = (y_a - gamma_k grad f(y_b, theta), x).
// Throws NonFiniteError (carrying k) if the result is not finite.
LiftedState lifted_map(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
                       const LiftedState& state);

// Alias of lifted_map: the iteration viewed as a pure function of the state,
// the form the derivative and analysis modules differentiate.
LiftedState step(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
                 const LiftedState& state);

// Jacobian of the lifted map in the state, a 2n x 2n block matrix
//   [ (1+a_k) I - gamma_k (1+b_k) H   -a_k I + gamma_k b_k H ]
//   [              I                             0           ]
// with H = hess_xx(y_b, theta).
Mat jac_state(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
              const LiftedState& state);

// Jacobian of the lifted map in theta: [ -gamma_k hess_xtheta(y_b, theta); 0 ].
Mat jac_param(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
              const LiftedState& state);

// Lipschitz bound of the lifted map in the state for an L-smooth objective:
//   sqrt(1 + (1 + a_k)^2 + (gamma_k L)^2 (1 + b_k)^2).
double lipschitz_bound_fk(const Schedule& s, long long k, double lipschitz);

struct StopRule {
    long long max_iter = 400;
    double grad_tol = 0.0;  // 0 disables the gradient test; exactly max_iter steps
};

// Scalar diagnostics recorded at every iterate.
struct TraceRecord {
    long long k = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    std::optional<double> iter_err;  // ||X_k - X*|| when the reference is known
    double a = 0.0, b = 0.0, gamma = 0.0;
};

struct RunTrace {
    std::vector<TraceRecord> records;       // one per iterate, k = 0..iterations
    std::vector<LiftedState> snapshots;     // every snapshot_every-th state
    long long snapshot_every = 1;
    long long iterations = 0;               // number of steps actually taken
    bool aborted_nonfinite = false;         // true if a step produced NaN/Inf;
                                            // records hold the finite prefix
    bool converged = false;                 // grad_tol reached before max_iter
};

// Runs the inertial iteration from x_0 (z_0 = x_0).  Records f, ||grad f||
// and the schedule values at every iterate; when x_star is given also
// ||X_k - X*|| with X* = (x*, x*).  On a non-finite step the trace prefix is
// returned with aborted_nonfinite set instead of throwing.
RunTrace run(const ProblemOracle& p, const Schedule& s, const Vec& theta, const Vec& x0,
             const StopRule& stop, const Vec* x_star = nullptr, long long snapshot_every = 1);

}  // namespace imdiff
