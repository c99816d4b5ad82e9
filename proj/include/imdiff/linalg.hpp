#pragma once

#include <cstddef>
#include <vector>

#include "imdiff/errors.hpp"

namespace imdiff {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec data;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw DimensionError("Mat: negative dimension");
    }

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int n);
};

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

// ---------------------------------------------------------------------------
// Kernels.  `ref` holds the plain serial implementations, kept permanently as
// the reference the tests compare against.  The unqualified front-door
// versions run the same element order with an OpenMP parallel loop over
// output rows/elements, so results are bitwise identical to `ref`.
// ---------------------------------------------------------------------------
namespace ref {
void matvec(const Mat& a, const Vec& x, Vec& y);    // y = A x
void matvec_t(const Mat& a, const Vec& x, Vec& y);  // y = A^T x
void matmul(const Mat& a, const Mat& b, Mat& c);    // C = A B
void matmul_tn(const Mat& a, const Mat& b, Mat& c); // C = A^T B
void gram(const Mat& a, Mat& g);                    // G = A^T A
}  // namespace ref

void matvec(const Mat& a, const Vec& x, Vec& y);
void matvec_t(const Mat& a, const Vec& x, Vec& y);
void matmul(const Mat& a, const Mat& b, Mat& c);
void matmul_tn(const Mat& a, const Mat& b, Mat& c);
void gram(const Mat& a, Mat& g);

Vec matvec(const Mat& a, const Vec& x);
Vec matvec_t(const Mat& a, const Vec& x);
Mat matmul(const Mat& a, const Mat& b);
Mat matmul_tn(const Mat& a, const Mat& b);
Mat gram(const Mat& a);
Mat transpose(const Mat& a);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double frob_norm(const Mat& m);
double norm1(const Mat& m);  // max column sum

// ---------------------------------------------------------------------------
// Dense solves: LU with partial pivoting plus a condition estimate.
// ---------------------------------------------------------------------------
struct LuFactors {
    Mat lu;                // combined L (unit lower) and U
    std::vector<int> piv;  // row swapped with i at step i
    bool singular = false;
};

LuFactors lu_factor(Mat a);
Vec lu_solve(const LuFactors& f, Vec b);
Mat lu_solve(const LuFactors& f, const Mat& b);

// 1-norm condition number ||A||_1 * ||A^-1||_1; the inverse norm is exact
// (n solves), affordable at the dimensions this library targets.
double lu_cond1(const LuFactors& f, double anorm1);

// Solves A X = B, throwing SingularMatrixError when the condition estimate
// exceeds 1/sqrt(machine epsilon).
Mat solve(const Mat& a, const Mat& b);
Vec solve(const Mat& a, const Vec& b);

// ---------------------------------------------------------------------------
// Symmetric eigensolver (cyclic Jacobi) and derived quantities.
// ---------------------------------------------------------------------------
Vec sym_eigenvalues(Mat s);                     // ascending
void sym_eigen(Mat s, Vec& w, Mat& v);          // w ascending, columns of v
double sym_spectral_norm(const Mat& s);         // max |eigenvalue|
double sigma_max(const Mat& a);                 // largest singular value

// Spectral radius estimate for a general square matrix by Gelfand's formula
// with repeated squaring: rho = lim ||M^(2^j)||^(1/2^j).  Converges from
// above; after ~48 squarings the bias is far below the tolerances used here.
// Independent of the eigenvalue routes, so it can cross-check them.
double spectral_radius_estimate(Mat m, int squarings = 48);

}  // namespace imdiff
