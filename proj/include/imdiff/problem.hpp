#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "imdiff/linalg.hpp"

namespace imdiff {

// Type-erased interface to a parametric objective f(x, theta).  Oracles are
// pure: closures capture immutable shared state only, so a single instance
// can be evaluated concurrently.
struct ProblemOracle {
    std::string name;
    int n = 0;  // dimension of x
    int m = 0;  // dimension of theta
    // Smallest L with ||grad f(x) - grad f(y)|| <= L ||x - y||; for the
    // log-exponential problem this is a sampled local estimate, not a bound.
    double lipschitz = 0.0;

    std::function<double(const Vec&, const Vec&)> value;
    std::function<Vec(const Vec&, const Vec&)> gradient;
    std::function<Mat(const Vec&, const Vec&)> hess_xx;      // n x n, symmetric
    std::function<Mat(const Vec&, const Vec&)> hess_xtheta;  // n x m

    // Closed-form minimizer and its derivative in theta, when available.
    std::function<Vec(const Vec&)> minimizer;            // n
    std::function<Mat(const Vec&)> minimizer_derivative; // n x m

    bool has_minimizer() const { return static_cast<bool>(minimizer); }
};

// f(x, theta) = 1/2 ||x - theta||^2 with theta in R^n.  L = 1 exactly.
ProblemOracle quadratic_problem(int n);

// Data for the two regression-style objectives.  The target is generated by
// the model itself: y(theta) = A * (x_tilde * theta^2 / 2), so the parameter
// moves the regression target along a known curve and the least-squares
// minimizer is x*(theta) = x_tilde * theta^2 / 2 in closed form.
struct LeastSquaresProblem {
    Mat a;        // m_rows x n, full column rank
    Vec x_tilde;  // n

    Vec target(double theta) const;  // y(theta)
};

struct LogExpProblem {
    Mat a;
    Vec x_tilde;

    Vec target(double theta) const;
};

// Builds the least-squares oracle f = 1/2 ||y(theta) - A x||^2 (theta scalar,
// m = 1).  L = sigma_max(A)^2; pass lipschitz_override > 0 to replace it
// (e.g. to reproduce setups that used ||A|| instead).  Throws
// StrongConvexityError if A is column-rank-deficient.
ProblemOracle least_squares_problem(const LeastSquaresProblem& p, double lipschitz_override = 0.0);

// Log-exponential oracle f = 1/2 lse(y(theta) - A x)^2 with
// lse(r) = log(sum_i exp(r_i)), evaluated in max-shifted form.  Not globally
// L-smooth; `lipschitz` is left 0 unless supplied, see
// estimate_local_lipschitz.
ProblemOracle logexp_problem(const LogExpProblem& p, double lipschitz = 0.0);

// Samples ||hess_xx(x, theta)||_2 at `samples` uniform points in the box
// center +- radius (componentwise) and returns 1.5x the maximum: a local
// curvature estimate for problems without a global smoothness constant.
double estimate_local_lipschitz(const ProblemOracle& p, const Vec& center, const Vec& theta,
                                double radius, int samples, std::uint64_t seed);

// Measurements at the zero-residual point x_bar(theta) = x_tilde*theta^2/2 of
// the log-exponential problem.  Reports, never asserts: whether x_bar is a
// critical point and how the Hessian there compares with -(e/m) A^T A.
struct CriticalPointReport {
    double grad_norm = 0.0;          // ||grad f(x_bar, theta)||
    double hess_eig_min = 0.0;       // extreme eigenvalues of hess_xx(x_bar)
    double hess_eig_max = 0.0;
    double claimed_hess_deviation = 0.0;  // ||hess_xx(x_bar) + (e/m) A^T A||_F
    double value = 0.0;              // f(x_bar, theta) = 1/2 log(m)^2
};

CriticalPointReport critical_point_report(const LogExpProblem& p, double theta);

// Random full-column-rank design matrix with standard normal entries
// (row-major fill order, so the instance is seed-reproducible).
Mat gaussian_matrix(int rows, int cols, std::uint64_t seed);

}  // namespace imdiff
