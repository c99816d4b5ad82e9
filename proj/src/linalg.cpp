#include "imdiff/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imdiff {

namespace {
// Below this many output elements the parallel front door stays serial;
// thread startup would dominate at desk scale.
constexpr long long kParallelCutoff = 16 * 1024;
}  // namespace

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Mat& m) { return all_finite(m.data); }

// ---------------------------------------------------------------------------
// Serial reference kernels.
// ---------------------------------------------------------------------------
namespace ref {

void matvec(const Mat& a, const Vec& x, Vec& y) {
    if (static_cast<int>(x.size()) != a.cols) throw DimensionError("matvec: size mismatch");
    y.assign(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double acc = 0.0;
        const double* row = &a.data[static_cast<std::size_t>(i) * a.cols];
        for (int j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_t(const Mat& a, const Vec& x, Vec& y) {
    if (static_cast<int>(x.size()) != a.rows) throw DimensionError("matvec_t: size mismatch");
    y.assign(a.cols, 0.0);
    for (int j = 0; j < a.cols; ++j) {
        double acc = 0.0;
        for (int i = 0; i < a.rows; ++i) acc += a(i, j) * x[i];
        y[j] = acc;
    }
}

void matmul(const Mat& a, const Mat& b, Mat& c) {
    if (a.cols != b.rows) throw DimensionError("matmul: inner dimensions differ");
    c = Mat(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
}

void matmul_tn(const Mat& a, const Mat& b, Mat& c) {
    if (a.rows != b.rows) throw DimensionError("matmul_tn: inner dimensions differ");
    c = Mat(a.cols, b.cols);
    for (int i = 0; i < a.cols; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.rows; ++k) acc += a(k, i) * b(k, j);
            c(i, j) = acc;
        }
}

void gram(const Mat& a, Mat& g) { ref::matmul_tn(a, a, g); }

}  // namespace ref

// ---------------------------------------------------------------------------
// OpenMP front door.  Each output element is produced by exactly one thread
// with the same inner accumulation order as the reference, so the results
// match ref:: bitwise regardless of thread count.
// ---------------------------------------------------------------------------

void matvec(const Mat& a, const Vec& x, Vec& y) {
    if (static_cast<int>(x.size()) != a.cols) throw DimensionError("matvec: size mismatch");
    y.assign(a.rows, 0.0);
    const long long work = static_cast<long long>(a.rows) * a.cols;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < a.rows; ++i) {
        double acc = 0.0;
        const double* row = &a.data[static_cast<std::size_t>(i) * a.cols];
        for (int j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_t(const Mat& a, const Vec& x, Vec& y) {
    if (static_cast<int>(x.size()) != a.rows) throw DimensionError("matvec_t: size mismatch");
    y.assign(a.cols, 0.0);
    const long long work = static_cast<long long>(a.rows) * a.cols;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int j = 0; j < a.cols; ++j) {
        double acc = 0.0;
        for (int i = 0; i < a.rows; ++i) acc += a(i, j) * x[i];
        y[j] = acc;
    }
}

void matmul(const Mat& a, const Mat& b, Mat& c) {
    if (a.cols != b.rows) throw DimensionError("matmul: inner dimensions differ");
    c = Mat(a.rows, b.cols);
    const long long work = static_cast<long long>(a.rows) * b.cols * a.cols;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
}

void matmul_tn(const Mat& a, const Mat& b, Mat& c) {
    if (a.rows != b.rows) throw DimensionError("matmul_tn: inner dimensions differ");
    c = Mat(a.cols, b.cols);
    const long long work = static_cast<long long>(a.cols) * b.cols * a.rows;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < a.cols; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.rows; ++k) acc += a(k, i) * b(k, j);
            c(i, j) = acc;
        }
}

void gram(const Mat& a, Mat& g) { matmul_tn(a, a, g); }

Vec matvec(const Mat& a, const Vec& x) {
    Vec y;
    matvec(a, x, y);
    return y;
}

Vec matvec_t(const Mat& a, const Vec& x) {
    Vec y;
    matvec_t(a, x, y);
    return y;
}

Mat matmul(const Mat& a, const Mat& b) {
    Mat c;
    matmul(a, b, c);
    return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
    Mat c;
    matmul_tn(a, b, c);
    return c;
}

Mat gram(const Mat& a) {
    Mat g;
    gram(a, g);
    return g;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double frob_norm(const Mat& m) {
    double acc = 0.0;
    for (double x : m.data) acc += x * x;
    return std::sqrt(acc);
}

double norm1(const Mat& m) {
    double best = 0.0;
    for (int j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows; ++i) s += std::fabs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

// ---------------------------------------------------------------------------
// LU with partial pivoting (Doolittle, in place).
// ---------------------------------------------------------------------------

LuFactors lu_factor(Mat a) {
    if (a.rows != a.cols) throw DimensionError("lu_factor: matrix not square");
    const int n = a.rows;
    LuFactors f;
    f.piv.resize(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(a(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        f.piv[k] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
        if (a(k, k) == 0.0) {
            f.singular = true;
            continue;
        }
        const double inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            a(i, k) *= inv;
            const double lik = a(i, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
    f.lu = std::move(a);
    return f;
}

Vec lu_solve(const LuFactors& f, Vec b) {
    const int n = f.lu.rows;
    if (static_cast<int>(b.size()) != n) throw DimensionError("lu_solve: size mismatch");
    if (f.singular) throw SingularMatrixError("lu_solve: matrix is singular");
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (int i = 1; i < n; ++i) {
        double acc = b[i];
        for (int j = 0; j < i; ++j) acc -= f.lu(i, j) * b[j];
        b[i] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= f.lu(i, j) * b[j];
        b[i] = acc / f.lu(i, i);
    }
    return b;
}

Mat lu_solve(const LuFactors& f, const Mat& b) {
    if (b.rows != f.lu.rows) throw DimensionError("lu_solve: size mismatch");
    Mat x(b.rows, b.cols);
    Vec col(b.rows);
    for (int j = 0; j < b.cols; ++j) {
        for (int i = 0; i < b.rows; ++i) col[i] = b(i, j);
        Vec sol = lu_solve(f, col);
        for (int i = 0; i < b.rows; ++i) x(i, j) = sol[i];
    }
    return x;
}

double lu_cond1(const LuFactors& f, double anorm1) {
    if (f.singular) return std::numeric_limits<double>::infinity();
    const int n = f.lu.rows;
    double inv_norm = 0.0;
    Vec e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vec col = lu_solve(f, e);
        e[j] = 0.0;
        double s = 0.0;
        for (double v : col) s += std::fabs(v);
        inv_norm = std::max(inv_norm, s);
    }
    return anorm1 * inv_norm;
}

namespace {
const double kCondLimit = 1.0 / std::sqrt(std::numeric_limits<double>::epsilon());
}

Mat solve(const Mat& a, const Mat& b) {
    LuFactors f = lu_factor(a);
    if (f.singular) throw SingularMatrixError("solve: matrix is singular");
    const double cond = lu_cond1(f, norm1(a));
    if (!(cond < kCondLimit))
        throw SingularMatrixError("solve: condition estimate " + std::to_string(cond) +
                                  " exceeds trust threshold");
    return lu_solve(f, b);
}

Vec solve(const Mat& a, const Vec& b) {
    Mat rhs(static_cast<int>(b.size()), 1);
    for (int i = 0; i < rhs.rows; ++i) rhs(i, 0) = b[i];
    Mat x = solve(a, rhs);
    Vec out(x.rows);
    for (int i = 0; i < x.rows; ++i) out[i] = x(i, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi for symmetric matrices.
// ---------------------------------------------------------------------------

namespace {

double off_diagonal_norm(const Mat& s) {
    double acc = 0.0;
    for (int i = 0; i < s.rows; ++i)
        for (int j = 0; j < s.cols; ++j)
            if (i != j) acc += s(i, j) * s(i, j);
    return std::sqrt(acc);
}

}  // namespace

void sym_eigen(Mat s, Vec& w, Mat& v) {
    if (s.rows != s.cols) throw DimensionError("sym_eigen: matrix not square");
    const int n = s.rows;
    v = Mat::identity(n);
    if (n == 0) {
        w.clear();
        return;
    }
    const double tol = 1e-14 * std::max(1.0, frob_norm(s));
    for (int sweep = 0; sweep < 100 && off_diagonal_norm(s) > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int i = 0; i < n; ++i) {
                    const double sip = s(i, p), siq = s(i, q);
                    s(i, p) = c * sip - sn * siq;
                    s(i, q) = sn * sip + c * siq;
                }
                for (int j = 0; j < n; ++j) {
                    const double spj = s(p, j), sqj = s(q, j);
                    s(p, j) = c * spj - sn * sqj;
                    s(q, j) = sn * spj + c * sqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - sn * viq;
                    v(i, q) = sn * vip + c * viq;
                }
            }
    }
    w.resize(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        w[i] = s(i, i);
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return s(a, a) < s(b, b); });
    Vec ws(n);
    Mat vs(n, n);
    for (int r = 0; r < n; ++r) {
        ws[r] = s(order[r], order[r]);
        for (int i = 0; i < n; ++i) vs(i, r) = v(i, order[r]);
    }
    w = std::move(ws);
    v = std::move(vs);
}

Vec sym_eigenvalues(Mat s) {
    Vec w;
    Mat v;
    sym_eigen(std::move(s), w, v);
    return w;
}

double sym_spectral_norm(const Mat& s) {
    Vec w = sym_eigenvalues(s);
    if (w.empty()) return 0.0;
    return std::max(std::fabs(w.front()), std::fabs(w.back()));
}

double sigma_max(const Mat& a) {
    Mat g = gram(a);
    Vec w = sym_eigenvalues(std::move(g));
    if (w.empty()) return 0.0;
    return std::sqrt(std::max(0.0, w.back()));
}

double spectral_radius_estimate(Mat m, int squarings) {
    if (m.rows != m.cols) throw DimensionError("spectral_radius_estimate: matrix not square");
    if (m.rows == 0) return 0.0;
    // Invariant: M^(2^j) = exp(log_scale) * m.
    double log_scale = 0.0;
    Mat tmp;
    for (int j = 0; j < squarings; ++j) {
        const double f = frob_norm(m);
        if (f == 0.0) return 0.0;
        if (!std::isfinite(f)) throw NonFiniteError("spectral_radius_estimate: overflow");
        const double inv = 1.0 / f;
        for (double& x : m.data) x *= inv;
        matmul(m, m, tmp);
        std::swap(m, tmp);
        log_scale = 2.0 * (log_scale + std::log(f));
    }
    const double f = frob_norm(m);
    if (f == 0.0) return 0.0;
    return std::exp((log_scale + std::log(f)) / std::exp2(static_cast<double>(squarings)));
}

}  // namespace imdiff
