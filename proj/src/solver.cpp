#include "imdiff/solver.hpp"

#include <cmath>
#include <string>

namespace imdiff {

namespace {

void require_state(const LiftedState& st, int n, const char* who) {
    if (static_cast<int>(st.x.size()) != n || static_cast<int>(st.z.size()) != n)
        throw DimensionError(std::string(who) + ": lifted state has wrong dimension");
}

Vec extrapolate(const Vec& x, const Vec& z, double coeff) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + coeff * (x[i] - z[i]);
    return y;
}

}  // namespace

LiftedState lifted_map(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
                       const LiftedState& state) {
    require_state(state, p.n, "lifted_map");
    const double a = s.a_at(k);
    const double b = s.b_at(k);
    const double gamma = s.gamma_at(k);

    const Vec ya = extrapolate(state.x, state.z, a);
    const Vec yb = extrapolate(state.x, state.z, b);
    const Vec grad = p.gradient(yb, theta);

    LiftedState next;
    next.x.resize(p.n);
    for (int i = 0; i < p.n; ++i) next.x[i] = ya[i] - gamma * grad[i];
    next.z = state.x;
    if (!all_finite(next.x))
        throw NonFiniteError("lifted_map: non-finite iterate at k = " + std::to_string(k), k);
    return next;
}

LiftedState step(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
                 const LiftedState& state) {
    return lifted_map(p, s, k, theta, state);
}

Mat jac_state(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
              const LiftedState& state) {
    require_state(state, p.n, "jac_state");
    const int n = p.n;
    const double a = s.a_at(k);
    const double b = s.b_at(k);
    const double gamma = s.gamma_at(k);
    const Vec yb = extrapolate(state.x, state.z, b);
    const Mat h = p.hess_xx(yb, theta);

    Mat j(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < n; ++c) {
            j(i, c) = -gamma * (1.0 + b) * h(i, c);
            j(i, n + c) = gamma * b * h(i, c);
        }
        j(i, i) += 1.0 + a;
        j(i, n + i) -= a;
        j(n + i, i) = 1.0;
    }
    return j;
}

Mat jac_param(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
              const LiftedState& state) {
    require_state(state, p.n, "jac_param");
    const int n = p.n;
    const double gamma = s.gamma_at(k);
    const Vec yb = extrapolate(state.x, state.z, s.b_at(k));
    const Mat ht = p.hess_xtheta(yb, theta);

    Mat j(2 * n, p.m);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < p.m; ++c) j(i, c) = -gamma * ht(i, c);
    return j;
}

double lipschitz_bound_fk(const Schedule& s, long long k, double lipschitz) {
    if (!(lipschitz > 0.0)) throw ParameterError("lipschitz_bound_fk: lipschitz must be positive");
    const double a = 1.0 + s.a_at(k);
    const double gb = s.gamma_at(k) * lipschitz * (1.0 + s.b_at(k));
    return std::sqrt(1.0 + a * a + gb * gb);
}

RunTrace run(const ProblemOracle& p, const Schedule& s, const Vec& theta, const Vec& x0,
             const StopRule& stop, const Vec* x_star, long long snapshot_every) {
    if (static_cast<int>(x0.size()) != p.n) throw DimensionError("run: x0 has wrong dimension");
    if (stop.max_iter < 0) throw ParameterError("run: max_iter must be nonnegative");
    if (snapshot_every < 1) throw ParameterError("run: snapshot_every must be >= 1");

    RunTrace trace;
    trace.snapshot_every = snapshot_every;
    LiftedState state{x0, x0};

    // Returns false when the diagnostics themselves overflow (f ~ ||x||^2 can
    // hit infinity while the iterate is still finite); the caller then aborts
    // so the trace prefix only ever holds finite rows.
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
            for (int i = 0; i < p.n; ++i) {
                const double dx = state.x[i] - (*x_star)[i];
                const double dz = state.z[i] - (*x_star)[i];
                acc += dx * dx + dz * dz;
            }
            r.iter_err = std::sqrt(acc);
        }
        if (!std::isfinite(r.f) || !std::isfinite(r.grad_norm) ||
            (r.iter_err && !std::isfinite(*r.iter_err)))
            return false;
        trace.records.push_back(std::move(r));
        if (k % snapshot_every == 0) trace.snapshots.push_back(state);
        return true;
    };

    for (long long k = 0; k <= stop.max_iter; ++k) {
        if (!record(k)) {
            trace.aborted_nonfinite = true;
            break;
        }
        if (stop.grad_tol > 0.0 && trace.records.back().grad_norm <= stop.grad_tol) {
            trace.converged = true;
            break;
        }
        if (k == stop.max_iter) break;
        try {
            state = lifted_map(p, s, k, theta, state);
        } catch (const NonFiniteError&) {
            trace.aborted_nonfinite = true;
            break;
        }
        trace.iterations = k + 1;
    }
    return trace;
}

}  // namespace imdiff
