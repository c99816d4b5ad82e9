#include "imdiff/problem.hpp"

#include <cmath>
#include <memory>

#include "imdiff/rng.hpp"

namespace imdiff {

namespace {

void require_theta(const Vec& theta, int m, const char* who) {
    if (static_cast<int>(theta.size()) != m)
        throw DimensionError(std::string(who) + ": theta has wrong dimension");
}

void require_x(const Vec& x, int n, const char* who) {
    if (static_cast<int>(x.size()) != n)
        throw DimensionError(std::string(who) + ": x has wrong dimension");
}

}  // namespace

ProblemOracle quadratic_problem(int n) {
    if (n <= 0) throw DimensionError("quadratic_problem: n must be positive");
    ProblemOracle p;
    p.name = "quadratic";
    p.n = n;
    p.m = n;
    p.lipschitz = 1.0;
    p.value = [n](const Vec& x, const Vec& theta) {
        require_x(x, n, "quadratic.value");
        require_theta(theta, n, "quadratic.value");
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = x[i] - theta[i];
            acc += d * d;
        }
        return 0.5 * acc;
    };
    p.gradient = [n](const Vec& x, const Vec& theta) {
        require_x(x, n, "quadratic.gradient");
        require_theta(theta, n, "quadratic.gradient");
        Vec g(n);
        for (int i = 0; i < n; ++i) g[i] = x[i] - theta[i];
        return g;
    };
    p.hess_xx = [n](const Vec&, const Vec&) { return Mat::identity(n); };
    p.hess_xtheta = [n](const Vec&, const Vec&) {
        Mat h(n, n);
        for (int i = 0; i < n; ++i) h(i, i) = -1.0;
        return h;
    };
    p.minimizer = [n](const Vec& theta) {
        require_theta(theta, n, "quadratic.minimizer");
        return theta;
    };
    p.minimizer_derivative = [n](const Vec&) { return Mat::identity(n); };
    return p;
}

// ---------------------------------------------------------------------------
// Least squares.
// ---------------------------------------------------------------------------

Vec LeastSquaresProblem::target(double theta) const {
    Vec xbar(x_tilde.size());
    for (std::size_t i = 0; i < x_tilde.size(); ++i) xbar[i] = 0.5 * x_tilde[i] * theta * theta;
    return matvec(a, xbar);
}

namespace {

struct LsData {
    Mat a;
    Vec x_tilde;
    Mat ata;          // A^T A
    Vec ata_xtilde;   // A^T A x_tilde
    Vec a_xtilde;     // A x_tilde
};

}  // namespace

ProblemOracle least_squares_problem(const LeastSquaresProblem& prob, double lipschitz_override) {
    const int n = prob.a.cols;
    const int rows = prob.a.rows;
    if (n <= 0 || rows <= 0) throw DimensionError("least_squares_problem: empty design matrix");
    if (static_cast<int>(prob.x_tilde.size()) != n)
        throw DimensionError("least_squares_problem: x_tilde has wrong dimension");

    auto d = std::make_shared<LsData>();
    d->a = prob.a;
    d->x_tilde = prob.x_tilde;
    d->ata = gram(prob.a);
    d->ata_xtilde = matvec(d->ata, prob.x_tilde);
    d->a_xtilde = matvec(prob.a, prob.x_tilde);

    Vec evals = sym_eigenvalues(d->ata);
    if (!(evals.front() > 1e-12 * std::max(1.0, evals.back())))
        throw StrongConvexityError(
            "least_squares_problem: A is rank deficient, objective not strongly convex");

    ProblemOracle p;
    p.name = "least_squares";
    p.n = n;
    p.m = 1;
    p.lipschitz = lipschitz_override > 0.0 ? lipschitz_override : evals.back();

    p.value = [d, n, rows](const Vec& x, const Vec& theta) {
        require_x(x, n, "least_squares.value");
        require_theta(theta, 1, "least_squares.value");
        const double t = theta[0];
        Vec r = matvec(d->a, x);
        double acc = 0.0;
        for (int i = 0; i < rows; ++i) {
            const double ri = 0.5 * t * t * d->a_xtilde[i] - r[i];
            acc += ri * ri;
        }
        if (!std::isfinite(acc)) throw NonFiniteError("least_squares.value: non-finite result");
        return 0.5 * acc;
    };
    p.gradient = [d, n, rows](const Vec& x, const Vec& theta) {
        require_x(x, n, "least_squares.gradient");
        require_theta(theta, 1, "least_squares.gradient");
        const double t = theta[0];
        Vec r = matvec(d->a, x);
        for (int i = 0; i < rows; ++i) r[i] = 0.5 * t * t * d->a_xtilde[i] - r[i];
        Vec g = matvec_t(d->a, r);
        for (double& v : g) v = -v;
        if (!all_finite(g)) throw NonFiniteError("least_squares.gradient: non-finite result");
        return g;
    };
    p.hess_xx = [d](const Vec&, const Vec&) { return d->ata; };
    p.hess_xtheta = [d, n](const Vec&, const Vec& theta) {
        require_theta(theta, 1, "least_squares.hess_xtheta");
        Mat h(n, 1);
        for (int i = 0; i < n; ++i) h(i, 0) = -theta[0] * d->ata_xtilde[i];
        return h;
    };
    p.minimizer = [d, n](const Vec& theta) {
        require_theta(theta, 1, "least_squares.minimizer");
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = 0.5 * d->x_tilde[i] * theta[0] * theta[0];
        return x;
    };
    p.minimizer_derivative = [d, n](const Vec& theta) {
        require_theta(theta, 1, "least_squares.minimizer_derivative");
        Mat dm(n, 1);
        for (int i = 0; i < n; ++i) dm(i, 0) = d->x_tilde[i] * theta[0];
        return dm;
    };
    return p;
}

// ---------------------------------------------------------------------------
// Log-exponential.
// ---------------------------------------------------------------------------

Vec LogExpProblem::target(double theta) const {
    Vec xbar(x_tilde.size());
    for (std::size_t i = 0; i < x_tilde.size(); ++i) xbar[i] = 0.5 * x_tilde[i] * theta * theta;
    return matvec(a, xbar);
}

namespace {

struct LogExpData {
    Mat a;
    Vec x_tilde;
    Vec a_xtilde;
};

struct SoftmaxParts {
    double lse;  // log sum exp of the residual
    Vec s;       // softmax of the residual
};

// Max-shifted evaluation; finite for residual entries within a few hundred in
// magnitude.
SoftmaxParts softmax_parts(const Vec& r) {
    double mx = r[0];
    for (double v : r) mx = std::max(mx, v);
    double sum = 0.0;
    Vec s(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        s[i] = std::exp(r[i] - mx);
        sum += s[i];
    }
    for (double& v : s) v /= sum;
    return {mx + std::log(sum), std::move(s)};
}

Vec residual(const LogExpData& d, const Vec& x, double t) {
    Vec r = matvec(d.a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * t * t * d.a_xtilde[i] - r[i];
    if (!all_finite(r)) throw NonFiniteError("logexp: non-finite residual");
    return r;
}

// Middle matrix of both Hessians: W = (1 - l) s s^T + l diag(s), where l is
// the lse value and s the softmax at the current residual.
Mat middle_matrix(const SoftmaxParts& sp) {
    const int m = static_cast<int>(sp.s.size());
    Mat w(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            w(i, j) = (1.0 - sp.lse) * sp.s[i] * sp.s[j];
            if (i == j) w(i, j) += sp.lse * sp.s[i];
        }
    return w;
}

Mat logexp_hess_xx(const LogExpData& d, const Vec& x, double t) {
    const SoftmaxParts sp = softmax_parts(residual(d, x, t));
    Mat wa = matmul(middle_matrix(sp), d.a);
    Mat h = matmul_tn(d.a, wa);
    if (!all_finite(h)) throw NonFiniteError("logexp.hess_xx: non-finite result");
    return h;
}

}  // namespace

ProblemOracle logexp_problem(const LogExpProblem& prob, double lipschitz) {
    const int n = prob.a.cols;
    const int rows = prob.a.rows;
    if (n <= 0 || rows <= 0) throw DimensionError("logexp_problem: empty design matrix");
    if (static_cast<int>(prob.x_tilde.size()) != n)
        throw DimensionError("logexp_problem: x_tilde has wrong dimension");
    if (frob_norm(prob.a) == 0.0) throw ParameterError("logexp_problem: A must be nonzero");

    auto d = std::make_shared<LogExpData>();
    d->a = prob.a;
    d->x_tilde = prob.x_tilde;
    d->a_xtilde = matvec(prob.a, prob.x_tilde);

    ProblemOracle p;
    p.name = "logexp";
    p.n = n;
    p.m = 1;
    p.lipschitz = lipschitz;

    p.value = [d, n](const Vec& x, const Vec& theta) {
        require_x(x, n, "logexp.value");
        require_theta(theta, 1, "logexp.value");
        const double l = softmax_parts(residual(*d, x, theta[0])).lse;
        if (!std::isfinite(l)) throw NonFiniteError("logexp.value: non-finite result");
        return 0.5 * l * l;
    };
    p.gradient = [d, n](const Vec& x, const Vec& theta) {
        require_x(x, n, "logexp.gradient");
        require_theta(theta, 1, "logexp.gradient");
        const SoftmaxParts sp = softmax_parts(residual(*d, x, theta[0]));
        Vec g = matvec_t(d->a, sp.s);
        for (double& v : g) v *= -sp.lse;
        if (!all_finite(g)) throw NonFiniteError("logexp.gradient: non-finite result");
        return g;
    };
    p.hess_xx = [d, n](const Vec& x, const Vec& theta) {
        require_x(x, n, "logexp.hess_xx");
        require_theta(theta, 1, "logexp.hess_xx");
        return logexp_hess_xx(*d, x, theta[0]);
    };
    // The theta direction enters only through the target curve
    // y(theta) = A x_tilde theta^2/2, so hess_xtheta = -hess_xx * x_tilde*theta.
    p.hess_xtheta = [d, n](const Vec& x, const Vec& theta) {
        require_x(x, n, "logexp.hess_xtheta");
        require_theta(theta, 1, "logexp.hess_xtheta");
        const Mat h = logexp_hess_xx(*d, x, theta[0]);
        Vec hx = matvec(h, d->x_tilde);
        Mat out(n, 1);
        for (int i = 0; i < n; ++i) out(i, 0) = -theta[0] * hx[i];
        return out;
    };
    return p;
}

double estimate_local_lipschitz(const ProblemOracle& p, const Vec& center, const Vec& theta,
                                double radius, int samples, std::uint64_t seed) {
    if (radius < 0.0 || samples <= 0)
        throw ParameterError("estimate_local_lipschitz: need radius >= 0 and samples > 0");
    require_x(center, p.n, "estimate_local_lipschitz");
    Rng rng(seed);
    double best = sym_spectral_norm(p.hess_xx(center, theta));
    Vec x(p.n);
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < p.n; ++i) x[i] = center[i] + radius * (2.0 * rng.uniform() - 1.0);
        best = std::max(best, sym_spectral_norm(p.hess_xx(x, theta)));
    }
    return 1.5 * best;
}

CriticalPointReport critical_point_report(const LogExpProblem& prob, double theta) {
    ProblemOracle p = logexp_problem(prob);
    const int n = p.n;
    Vec xbar(n);
    for (int i = 0; i < n; ++i) xbar[i] = 0.5 * prob.x_tilde[i] * theta * theta;
    const Vec th{theta};

    CriticalPointReport rep;
    rep.value = p.value(xbar, th);
    rep.grad_norm = norm2(p.gradient(xbar, th));

    const Mat h = p.hess_xx(xbar, th);
    Vec w = sym_eigenvalues(h);
    rep.hess_eig_min = w.front();
    rep.hess_eig_max = w.back();

    // Deviation from the claimed form -(e/m) A^T A at the zero-residual point.
    const double coeff = std::exp(1.0) / static_cast<double>(prob.a.rows);
    Mat ata = gram(prob.a);
    double acc = 0.0;
    for (std::size_t i = 0; i < ata.data.size(); ++i) {
        const double diff = h.data[i] + coeff * ata.data[i];
        acc += diff * diff;
    }
    rep.claimed_hess_deviation = std::sqrt(acc);
    return rep;
}

Mat gaussian_matrix(int rows, int cols, std::uint64_t seed) {
    if (rows <= 0 || cols <= 0) throw DimensionError("gaussian_matrix: dimensions must be positive");
    Rng rng(seed);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    return m;
}

}  // namespace imdiff
