#include <doctest.h>

#include <cmath>

#include "imdiff/rng.hpp"
#include "imdiff/solver.hpp"

using namespace imdiff;

namespace {

Vec random_vec(Rng& rng, int n) {
    Vec v(n);
    for (double& x : v) x = rng.gaussian();
    return v;
}

// Finite-difference Jacobian of the lifted map in the stacked state (x; z).
Mat fd_jac_state(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
                 const LiftedState& st, double h) {
    const int n = p.n;
    Mat j(2 * n, 2 * n);
    for (int col = 0; col < 2 * n; ++col) {
        LiftedState up = st, dn = st;
        (col < n ? up.x[col] : up.z[col - n]) += h;
        (col < n ? dn.x[col] : dn.z[col - n]) -= h;
        const LiftedState fu = lifted_map(p, s, k, theta, up);
        const LiftedState fd = lifted_map(p, s, k, theta, dn);
        for (int row = 0; row < n; ++row) {
            j(row, col) = (fu.x[row] - fd.x[row]) / (2.0 * h);
            j(n + row, col) = (fu.z[row] - fd.z[row]) / (2.0 * h);
        }
    }
    return j;
}

Mat fd_jac_param(const ProblemOracle& p, const Schedule& s, long long k, const Vec& theta,
                 const LiftedState& st, double h) {
    const int n = p.n;
    Mat j(2 * n, p.m);
    for (int col = 0; col < p.m; ++col) {
        Vec tp = theta, tm = theta;
        tp[col] += h;
        tm[col] -= h;
        const LiftedState fu = lifted_map(p, s, k, tp, st);
        const LiftedState fd = lifted_map(p, s, k, tm, st);
        for (int row = 0; row < n; ++row) {
            j(row, col) = (fu.x[row] - fd.x[row]) / (2.0 * h);
            j(n + row, col) = (fu.z[row] - fd.z[row]) / (2.0 * h);
        }
    }
    return j;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("one step matches the hand-computed update") {
    // Quadratic with theta = 0: grad f(y) = y.  With a = 0.3, b = 0.2,
    // gamma = 0.5, x = (1, 2), z = (0, 1):
    //   y_a = x + 0.3 (x - z) = (1.3, 2.3)
    //   y_b = x + 0.2 (x - z) = (1.2, 2.2)
    //   next.x = y_a - 0.5 y_b = (0.7, 1.2),  next.z = x.
    const ProblemOracle p = quadratic_problem(2);
    Schedule s;
    s.name = "custom";
    s.a_at = [](long long) { return 0.3; };
    s.b_at = [](long long) { return 0.2; };
    s.gamma_at = [](long long) { return 0.5; };
    s.limits = {0.3, 0.2, 0.5};

    const LiftedState st{{1.0, 2.0}, {0.0, 1.0}};
    const LiftedState nx = lifted_map(p, s, 0, Vec(2, 0.0), st);
    CHECK(nx.x[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(nx.x[1] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(nx.z[0] == 1.0);
    CHECK(nx.z[1] == 2.0);
}

TEST_CASE("the shifted block is copied bitwise, not recomputed") {
    const LeastSquaresProblem data{gaussian_matrix(9, 4, 5), Vec(4, 1.0)};
    const ProblemOracle p = least_squares_problem(data);
    const Schedule s = preset("case1", p.lipschitz);
    Rng rng(11);
    LiftedState st{random_vec(rng, 4), random_vec(rng, 4)};
    for (long long k = 0; k < 5; ++k) {
        const LiftedState nx = lifted_map(p, s, k, {1.0}, st);
        CHECK(nx.z == st.x);  // exact vector equality
        st = nx;
    }
}

TEST_CASE("gradient descent on the quadratic contracts monotonically") {
    const ProblemOracle p = quadratic_problem(3);
    const Schedule s = preset("gradient_descent", p.lipschitz, {.gamma = 0.7});
    const Vec theta{1.0, -2.0, 0.5};
    const RunTrace tr = run(p, s, theta, Vec(3, 5.0), {.max_iter = 50});
    REQUIRE(tr.records.size() == 51);
    CHECK(tr.iterations == 50);
    for (std::size_t i = 1; i < tr.records.size(); ++i)
        CHECK(tr.records[i].f <= tr.records[i - 1].f);
    // x_k - theta = (1 - gamma)^k (x_0 - theta), so the gradient norm decays
    // like 0.3^k until the update rounds away entirely (once |x - theta| drops
    // below half an ulp of theta, around k = 35) and x lands exactly on theta.
    CHECK(tr.records.back().grad_norm == 0.0);
    CHECK(tr.records[20].grad_norm > 0.0);
    CHECK(tr.records[20].grad_norm <= std::pow(0.3, 20) * 10.0);
}

TEST_CASE("gradient descent error follows (1 - gamma)^k exactly") {
    // Scalar quadratic: x_{k+1} = x_k - 0.25 (x_k - 2) so
    // x_k - 2 = 0.75^k (x_0 - 2), representable exactly in binary.
    const ProblemOracle p = quadratic_problem(1);
    const Schedule s = preset("gradient_descent", 1.0, {.gamma = 0.25});
    const Vec theta{2.0};
    const Vec x0{6.0};
    const RunTrace tr = run(p, s, theta, x0, {.max_iter = 20});
    for (long long k = 0; k <= 20; ++k) {
        const double expected = std::pow(0.75, static_cast<double>(k)) * 4.0;
        CHECK(tr.records[static_cast<std::size_t>(k)].grad_norm == expected);
    }
}

TEST_CASE("run records iter_err against the lifted reference") {
    const ProblemOracle p = quadratic_problem(2);
    const Schedule s = preset("gradient_descent", 1.0);
    const Vec theta{1.0, 1.0};
    const Vec xstar = p.minimizer(theta);
    const RunTrace tr = run(p, s, theta, Vec(2, 0.0), {.max_iter = 5}, &xstar);
    REQUIRE(tr.records[0].iter_err.has_value());
    // ||X_0 - X*|| = sqrt(2) ||x_0 - x*|| since z_0 = x_0.
    CHECK(*tr.records[0].iter_err == doctest::Approx(std::sqrt(2.0) * std::sqrt(2.0)));
    // Without a reference the field stays empty.
    const RunTrace tr2 = run(p, s, theta, Vec(2, 0.0), {.max_iter = 2});
    CHECK(!tr2.records[0].iter_err.has_value());
}

TEST_CASE("gradient tolerance stops the run early") {
    const ProblemOracle p = quadratic_problem(2);
    const Schedule s = preset("gradient_descent", 1.0, {.gamma = 0.5});
    const RunTrace tr = run(p, s, Vec(2, 0.0), Vec(2, 1.0), {.max_iter = 400, .grad_tol = 1e-6});
    CHECK(tr.converged);
    CHECK(tr.iterations < 400);
    CHECK(tr.records.back().grad_norm <= 1e-6);
    // One record per computed iterate, k = 0..iterations.
    CHECK(tr.records.size() == static_cast<std::size_t>(tr.iterations) + 1);
}

TEST_CASE("a divergent step aborts with the finite prefix") {
    const ProblemOracle p = quadratic_problem(1);
    // gamma far above 2/L: the error grows by ~1e12 per step and the
    // diagnostics overflow after ~13 steps.
    const Schedule s = preset("gradient_descent", 1.0, {.gamma = 1e12});
    const RunTrace tr = run(p, s, Vec{0.0}, Vec{1e3}, {.max_iter = 100});
    CHECK(tr.aborted_nonfinite);
    CHECK(!tr.converged);
    CHECK(tr.records.size() >= 1);
    CHECK(tr.records.size() < 101);
    for (const TraceRecord& r : tr.records) {
        CHECK(std::isfinite(r.f));
        CHECK(std::isfinite(r.grad_norm));
    }
}

TEST_CASE("snapshots honour the stride") {
    const ProblemOracle p = quadratic_problem(2);
    const Schedule s = preset("gradient_descent", 1.0);
    const RunTrace tr =
        run(p, s, Vec(2, 1.0), Vec(2, 0.0), {.max_iter = 10}, nullptr, 3);
    CHECK(tr.snapshot_every == 3);
    CHECK(tr.snapshots.size() == 4);  // k = 0, 3, 6, 9
    CHECK(tr.snapshots.front().x == Vec(2, 0.0));
}

TEST_CASE("state jacobian matches finite differences and its block layout") {
    const LeastSquaresProblem data{gaussian_matrix(10, 3, 21), Vec(3, 1.0)};
    const ProblemOracle p = least_squares_problem(data);
    const Schedule s = preset("case1", p.lipschitz);
    Rng rng(8);
    const LiftedState st{random_vec(rng, 3), random_vec(rng, 3)};
    const Vec theta{1.3};

    for (long long k : {0LL, 1LL, 7LL}) {
        const Mat j = jac_state(p, s, k, theta, st);
        REQUIRE(j.rows == 6);
        REQUIRE(j.cols == 6);
        CHECK(max_abs_diff(j, fd_jac_state(p, s, k, theta, st, 1e-6)) <= 1e-5);
        // Bottom blocks are exactly [I 0].
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 6; ++c)
                CHECK(j(3 + i, c) == ((c == i) ? 1.0 : 0.0));
    }
}

TEST_CASE("parameter jacobian matches finite differences") {
    const LeastSquaresProblem data{gaussian_matrix(10, 3, 21), Vec(3, 1.0)};
    const ProblemOracle p = least_squares_problem(data);
    const Schedule s = preset("case1", p.lipschitz);
    Rng rng(9);
    const LiftedState st{random_vec(rng, 3), random_vec(rng, 3)};
    const Vec theta{0.8};

    const Mat j = jac_param(p, s, 2, theta, st);
    REQUIRE(j.rows == 6);
    REQUIRE(j.cols == 1);
    CHECK(max_abs_diff(j, fd_jac_param(p, s, 2, theta, st, 1e-6)) <= 1e-5);
    for (int i = 0; i < 3; ++i) CHECK(j(3 + i, 0) == 0.0);  // bottom block is 0
}

TEST_CASE("lipschitz bound dominates sampled stretch factors") {
    const LeastSquaresProblem data{gaussian_matrix(12, 4, 33), Vec(4, 1.0)};
    const ProblemOracle p = least_squares_problem(data);
    const Schedule s = preset("case1", p.lipschitz);
    const Vec theta{1.0};
    Rng rng(17);

    for (long long k : {0LL, 3LL, 11LL}) {
        const double bound = lipschitz_bound_fk(s, k, p.lipschitz);
        // Closed form: sqrt(1 + (1+a)^2 + (gamma L)^2 (1+b)^2).
        const double a = s.a_at(k), b = s.b_at(k), g = s.gamma_at(k);
        const double gl = g * p.lipschitz;
        CHECK(bound ==
              doctest::Approx(std::sqrt(1.0 + (1.0 + a) * (1.0 + a) + gl * gl * (1.0 + b) * (1.0 + b))));

        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const LiftedState u{random_vec(rng, 4), random_vec(rng, 4)};
            const LiftedState v{random_vec(rng, 4), random_vec(rng, 4)};
            const LiftedState fu = lifted_map(p, s, k, theta, u);
            const LiftedState fv = lifted_map(p, s, k, theta, v);
            double num = 0.0, den = 0.0;
            for (int i = 0; i < 4; ++i) {
                num += (fu.x[i] - fv.x[i]) * (fu.x[i] - fv.x[i]);
                num += (fu.z[i] - fv.z[i]) * (fu.z[i] - fv.z[i]);
                den += (u.x[i] - v.x[i]) * (u.x[i] - v.x[i]);
                den += (u.z[i] - v.z[i]) * (u.z[i] - v.z[i]);
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
        CHECK(worst <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const ProblemOracle p = quadratic_problem(2);
    const Schedule s = preset("gradient_descent", 1.0);
    CHECK_THROWS_AS(lifted_map(p, s, 0, Vec(2, 0.0), LiftedState{Vec(3, 0.0), Vec(3, 0.0)}),
                    DimensionError);
    CHECK_THROWS_AS(run(p, s, Vec(1, 0.0), Vec(2, 0.0), {.max_iter = 1}), DimensionError);
}

}  // TEST_SUITE
