#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imdiff/deriv.hpp"

namespace imdiff {

// Numerical floor below which error values are treated as converged noise and
// excluded from fits.
inline constexpr double kErrorFloor = 1e-13;

struct ErrorSeries {
    std::vector<double> iter_err;   // ||X_k - X*||
    std::vector<double> deriv_err;  // ||D_k - D*||_F
};

// Recomputes both error series from the per-iterate states of a joint trace.
ErrorSeries error_series(const JointTrace& jt, const LiftedState& x_star, const Mat& d_star);

// Least-squares fit of log(err_k) ~ alpha + k log(rate) over the last
// `tail_fraction` of the entries lying above kErrorFloor.
struct RateReport {
    double fitted_rate = 0.0;
    std::pair<long long, long long> window{0, 0};  // first/last k used
    double r_squared = 0.0;
    // Filled by full_report: the theoretical comparison values.
    double theory_rate = 0.0;
    double envelope_eps = 0.0;
};

// Throws InsufficientDataError when fewer than 10 entries lie above the
// floor (or the tail keeps fewer than 2 of them).
RateReport fit_rate(const std::vector<double>& err, double tail_fraction);

// Per-step inequality  e_{k+1} <= 2 rho e_k + eps (2 + e_k)  from iteration K
// on: records the smallest admissible eps per step and their maximum (the
// smallest uniform eps making every step from K hold).
struct StepInequalityReport {
    double min_eps = 0.0;
    std::vector<double> eps_per_k;  // entry j corresponds to step K + j
    long long start = 0;            // = K
};

StepInequalityReport step_inequality_check(const std::vector<double>& deriv_err, double rho,
                                           long long start);

// Envelope implied by unrolling the step inequality with tau = 2 rho:
//   bound(k) = tau^{k+1-K} err_K + eps * sum_{i=K..k} tau^{i-K} g[i-K],
// where g[j] = 2 + err_{K+j}.  Returns the bound for a single k >= K.
double envelope_bound(double err_at_start, double rho, double eps, const std::vector<double>& g,
                      long long start, long long k);

// Central finite difference of theta -> X_k(theta) with fixed iteration count
// (the gradient stop test is disabled so both perturbed runs take exactly k
// steps).  Returns a 2n x m matrix.
Mat fd_derivative(const ProblemOracle& p, const Schedule& s, const Vec& theta, const Vec& x0,
                  long long k, double h);

// Everything the CLI reports for one configured run.
struct FullReport {
    std::string problem;
    std::string schedule;
    double lipschitz = 0.0;
    double rho = 0.0;
    double eta_min = 0.0, eta_max = 0.0;

    long long iterations = 0;
    long long burn_in = 0;  // K: first k with iter_err <= burn_in_drop * iter_err[0]
    bool burn_in_reached = true;

    std::optional<RateReport> iter_rate;
    std::optional<RateReport> deriv_rate;
    double min_eps = 0.0;
    bool envelope_contractive = false;  // 2 rho < 1

    PremiseBReport premise_b;
    PremiseCReport premise_c;

    std::string xstar_source;  // "closed_form" or "solved"
    bool xstar_converged = true;
    // False when the implicit fixed-point system is too ill-conditioned to
    // trust (e.g. non-isolated minima); derivative references are then
    // omitted and the derivative-error columns stay empty.
    bool dstar_available = true;
    bool aborted_nonfinite = false;
    double final_iter_err = 0.0;
    double final_deriv_err = 0.0;
    double fd_check_rel_err = -1.0;  // -1 when the FD cross-check is skipped

    std::vector<TraceRecord> records;
    std::vector<double> iter_err;
    std::vector<double> deriv_err;
    std::vector<double> theory_iter_bound;      // rho^{k-K} err_K for k >= K
    std::vector<double> theory_deriv_envelope;  // envelope_bound for k >= K
};

struct ReportOptions {
    double tail_fraction = 0.25;
    double burn_in_drop = 1e-3;  // K = first k with iter_err below this times err_0
    long long premise_scan_k = 400;
    bool fd_check = false;  // also run one FD cross-check at the final iterate
    double fd_h = 1e-5;
};

// Orchestrates a joint run against its fixed-point references and assembles
// measured rates, the per-step inequality, envelopes and premise reports.
FullReport full_report(const ProblemOracle& p, const Schedule& s, const Vec& theta, const Vec& x0,
                       const Mat& dx0, long long max_iter, const ReportOptions& opts = {});

}  // namespace imdiff
