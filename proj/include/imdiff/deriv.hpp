#pragma once

#include <optional>
#include <vector>

#include "imdiff/solver.hpp"

namespace imdiff {

// Derivative of the lifted state in theta: D_k = dX_k/dtheta, a 2n x m matrix
// paired with the iteration index it belongs to.
struct DerivativeState {
    Mat d;
    long long k = 0;
};

// Forward-mode propagation through one step:
//   D_{k+1} = jac_state(X_k) D_k + jac_param(X_k),
// evaluated blockwise so the 2n x 2n Jacobian is never formed.  The bottom
// block of the result is the top block of the input (the shift structure of
// the lifted map), copied verbatim.
DerivativeState propagate_step(const ProblemOracle& p, const Schedule& s, const Vec& theta,
                               const LiftedState& state, const DerivativeState& deriv);

// Trace of a joint (state, derivative) run.  Derivative states are kept for
// every iterate; at the desk scales this library targets that is O(k n m)
// doubles and deliberately not thinned.
struct JointTrace {
    RunTrace trace;
    std::vector<LiftedState> states;     // X_k for every k
    std::vector<Mat> derivatives;        // D_k for every k
    std::vector<double> deriv_err;       // ||D_k - D*||_F when reference known
};

// Runs the iteration and the derivative recursion side by side from
// X_0 = (x0, x0), D_0 = [dx0; dx0] (dx0 is n x m).  When references are given,
// per-k errors ||X_k - X*|| and ||D_k - D*||_F are recorded in the trace.
JointTrace run_with_derivative(const ProblemOracle& p, const Schedule& s, const Vec& theta,
                               const Vec& x0, const Mat& dx0, long long max_iter,
                               const LiftedState* x_star = nullptr, const Mat* d_star = nullptr);

// The limit iteration matrix at a fixed point x* for schedule limits
// (a, b, gamma):
//   M = [ (a-b) I + (1+b) G   -(a-b) I - b G ]    with G = I - gamma H*,
//       [        I                  0        ]    H* = hess_xx(x*, theta).
struct LimitMatrixResult {
    Mat m;            // 2n x 2n
    Mat g;            // n x n
    Vec eta;          // eigenvalues of G, ascending
    double rho = 0.0; // spectral radius of M via the eigenvalue quadratic
    double grad_norm_at_xstar = 0.0;
    bool hessian_indefinite = false;  // H* has a negative eigenvalue
    bool xstar_inexact = false;       // ||grad f(x*)|| above tolerance
};

LimitMatrixResult limit_matrix(const ProblemOracle& p, const ScheduleLimits& limits,
                               const Vec& theta, const Vec& x_star);

// Spectral radius of M from the eigenvalues of G alone: each eta contributes
// the roots of  sigma^2 - ((a-b) + (1+b) eta) sigma + (a-b) + b eta = 0,
// and rho(M) is the largest root magnitude.  O(n) once eta is known, versus
// a dense eigensolve on the 2n x 2n matrix.
double spectral_radius(const Vec& eta, double a, double b);
double spectral_radius(const LimitMatrixResult& lm, const ScheduleLimits& limits);

// Derivative of the fixed point X* = (x*, x*) in theta, from the implicit
// equation X* = F(X*, theta):
//   [ -a I + gamma (1+b) H*   a I - gamma b H* ] d = [ -gamma hess_xtheta* ]
//   [          -I                    I         ]     [          0          ]
// Throws SingularMatrixError if the system's condition estimate is beyond
// 1/sqrt(machine epsilon).  Both n x m blocks of the result are equal.
Mat fixed_point_derivative(const ProblemOracle& p, const ScheduleLimits& limits, const Vec& theta,
                           const Vec& x_star);

// Same computation for a generic contraction X = Phi(X, theta) given the two
// Jacobians at the fixed point: solves (I - jx) d = jtheta.  Requires
// rho(jx) < 1 (checked with the repeated-squaring estimate); throws
// PremiseViolationError otherwise.
Mat generic_fixed_point_derivative(const Mat& jx, const Mat& jtheta);

}  // namespace imdiff
