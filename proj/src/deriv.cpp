#include "imdiff/deriv.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace imdiff {

DerivativeState propagate_step(const ProblemOracle& p, const Schedule& s, const Vec& theta,
                               const LiftedState& state, const DerivativeState& deriv) {
    const int n = p.n;
    const int m = p.m;
    if (deriv.d.rows != 2 * n || deriv.d.cols != m)
        throw DimensionError("propagate_step: derivative state has wrong shape");
    const long long k = deriv.k;
    const double a = s.a_at(k);
    const double b = s.b_at(k);
    const double gamma = s.gamma_at(k);

    Vec yb(n);
    for (int i = 0; i < n; ++i) yb[i] = state.x[i] + b * (state.x[i] - state.z[i]);
    const Mat h = p.hess_xx(yb, theta);
    const Mat ht = p.hess_xtheta(yb, theta);

    // Split D into its x and z blocks and push each column through the block
    // formula: top = (1+a) dx - a dz - gamma ((1+b) H dx - b H dz + ht).
    Mat dx(n, m), dz(n, m);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            dx(i, c) = deriv.d(i, c);
            dz(i, c) = deriv.d(n + i, c);
        }
    const Mat hdx = matmul(h, dx);
    const Mat hdz = matmul(h, dz);

    DerivativeState next;
    next.k = k + 1;
    next.d = Mat(2 * n, m);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            next.d(i, c) = (1.0 + a) * dx(i, c) - a * dz(i, c) -
                           gamma * ((1.0 + b) * hdx(i, c) - b * hdz(i, c) + ht(i, c));
            next.d(n + i, c) = dx(i, c);
        }
    if (!all_finite(next.d))
        throw NonFiniteError("propagate_step: non-finite derivative at k = " + std::to_string(k), k);
    return next;
}

JointTrace run_with_derivative(const ProblemOracle& p, const Schedule& s, const Vec& theta,
                               const Vec& x0, const Mat& dx0, long long max_iter,
                               const LiftedState* x_star, const Mat* d_star) {
    const int n = p.n;
    const int m = p.m;
    if (static_cast<int>(x0.size()) != n)
        throw DimensionError("run_with_derivative: x0 has wrong dimension");
    if (dx0.rows != n || dx0.cols != m)
        throw DimensionError("run_with_derivative: dx0 must be n x m");
    if (max_iter < 0) throw ParameterError("run_with_derivative: max_iter must be nonnegative");

    JointTrace jt;
    jt.trace.snapshot_every = 1;

    LiftedState state{x0, x0};
    DerivativeState deriv;
    deriv.k = 0;
    deriv.d = Mat(2 * n, m);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            deriv.d(i, c) = dx0(i, c);
            deriv.d(n + i, c) = dx0(i, c);
        }

    // Same contract as run(): rows are only recorded while every diagnostic is
    // finite, so an aborted trace is a clean prefix.
    auto record = [&](long long k) -> bool {
        TraceRecord r;
        r.k = k;
        try {
            r.f = p.value(state.x, theta);
            r.grad_norm = norm2(p.gradient(state.x, theta));
        } catch (const NonFiniteError&) {
            return false;
        }
        r.a = s.a_at(k);
        r.b = s.b_at(k);
        r.gamma = s.gamma_at(k);
        if (x_star) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double dx = state.x[i] - x_star->x[i];
                const double dz = state.z[i] - x_star->z[i];
                acc += dx * dx + dz * dz;
            }
            r.iter_err = std::sqrt(acc);
        }
        if (!std::isfinite(r.f) || !std::isfinite(r.grad_norm) ||
            (r.iter_err && !std::isfinite(*r.iter_err)))
            return false;
        jt.trace.records.push_back(std::move(r));
        jt.states.push_back(state);
        jt.derivatives.push_back(deriv.d);
        if (d_star) {
            double acc = 0.0;
            for (std::size_t i = 0; i < deriv.d.data.size(); ++i) {
                const double diff = deriv.d.data[i] - d_star->data[i];
                acc += diff * diff;
            }
            jt.deriv_err.push_back(std::sqrt(acc));
        }
        return true;
    };

    for (long long k = 0; k <= max_iter; ++k) {
        if (!record(k)) {
            jt.trace.aborted_nonfinite = true;
            break;
        }
        if (k == max_iter) break;
        try {
            DerivativeState next_d = propagate_step(p, s, theta, state, deriv);
            state = lifted_map(p, s, k, theta, state);
            deriv = std::move(next_d);
        } catch (const NonFiniteError&) {
            jt.trace.aborted_nonfinite = true;
            break;
        }
        jt.trace.iterations = k + 1;
    }
    return jt;
}

LimitMatrixResult limit_matrix(const ProblemOracle& p, const ScheduleLimits& limits,
                               const Vec& theta, const Vec& x_star) {
    const int n = p.n;
    if (static_cast<int>(x_star.size()) != n)
        throw DimensionError("limit_matrix: x_star has wrong dimension");

    LimitMatrixResult out;
    out.grad_norm_at_xstar = norm2(p.gradient(x_star, theta));
    out.xstar_inexact = out.grad_norm_at_xstar > 1e-6;

    const Mat h = p.hess_xx(x_star, theta);
    Vec hw = sym_eigenvalues(h);
    out.hessian_indefinite = hw.front() < -1e-10 * std::max(1.0, std::fabs(hw.back()));

    out.g = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.g(i, j) = (i == j ? 1.0 : 0.0) - limits.gamma * h(i, j);

    // Eigenvalues of G from those of H (same eigenvectors).
    out.eta.resize(n);
    for (int i = 0; i < n; ++i) out.eta[i] = 1.0 - limits.gamma * hw[n - 1 - i];

    const double a = limits.a;
    const double b = limits.b;
    out.m = Mat(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out.m(i, j) = (1.0 + b) * out.g(i, j);
            out.m(i, n + j) = -b * out.g(i, j);
        }
        out.m(i, i) += a - b;
        out.m(i, n + i) -= a - b;
        out.m(n + i, i) = 1.0;
    }
    out.rho = spectral_radius(out.eta, a, b);
    return out;
}

double spectral_radius(const Vec& eta, double a, double b) {
    double rho = 0.0;
    for (const double e : eta) {
        const std::complex<double> bb((a - b) + (1.0 + b) * e, 0.0);
        const std::complex<double> cc((a - b) + b * e, 0.0);
        const std::complex<double> disc = bb * bb - 4.0 * cc;
        const std::complex<double> root = std::sqrt(disc);
        rho = std::max(rho, std::abs(0.5 * (bb + root)));
        rho = std::max(rho, std::abs(0.5 * (bb - root)));
    }
    return rho;
}

double spectral_radius(const LimitMatrixResult& lm, const ScheduleLimits& limits) {
    return spectral_radius(lm.eta, limits.a, limits.b);
}

Mat fixed_point_derivative(const ProblemOracle& p, const ScheduleLimits& limits, const Vec& theta,
                           const Vec& x_star) {
    const int n = p.n;
    const int m = p.m;
    if (static_cast<int>(x_star.size()) != n)
        throw DimensionError("fixed_point_derivative: x_star has wrong dimension");
    const double a = limits.a;
    const double b = limits.b;
    const double gamma = limits.gamma;

    const Mat h = p.hess_xx(x_star, theta);
    const Mat ht = p.hess_xtheta(x_star, theta);

    Mat sys(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            sys(i, j) = gamma * (1.0 + b) * h(i, j);
            sys(i, n + j) = -gamma * b * h(i, j);
        }
        sys(i, i) -= a;
        sys(i, n + i) += a;
        sys(n + i, i) = -1.0;
        sys(n + i, n + i) = 1.0;
    }
    Mat rhs(2 * n, m);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) rhs(i, c) = -gamma * ht(i, c);
    return solve(sys, rhs);
}

Mat generic_fixed_point_derivative(const Mat& jx, const Mat& jtheta) {
    if (jx.rows != jx.cols) throw DimensionError("generic_fixed_point_derivative: jx not square");
    if (jtheta.rows != jx.rows)
        throw DimensionError("generic_fixed_point_derivative: jtheta row count mismatch");
    const double rho = spectral_radius_estimate(jx);
    if (!(rho < 1.0))
        throw PremiseViolationError(
            "generic_fixed_point_derivative: spectral radius estimate " + std::to_string(rho) +
            " is not < 1; the fixed point is not a contraction target");
    Mat sys(jx.rows, jx.cols);
    for (int i = 0; i < jx.rows; ++i)
        for (int j = 0; j < jx.cols; ++j) sys(i, j) = (i == j ? 1.0 : 0.0) - jx(i, j);
    return solve(sys, jtheta);
}

}  // namespace imdiff
