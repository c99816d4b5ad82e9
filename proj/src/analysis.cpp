#include "imdiff/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace imdiff {

ErrorSeries error_series(const JointTrace& jt, const LiftedState& x_star, const Mat& d_star) {
    ErrorSeries es;
    es.iter_err.reserve(jt.states.size());
    es.deriv_err.reserve(jt.derivatives.size());
    for (const LiftedState& st : jt.states) {
        double acc = 0.0;
        for (std::size_t i = 0; i < st.x.size(); ++i) {
            const double dx = st.x[i] - x_star.x[i];
            const double dz = st.z[i] - x_star.z[i];
            acc += dx * dx + dz * dz;
        }
        es.iter_err.push_back(std::sqrt(acc));
    }
    for (const Mat& d : jt.derivatives) {
        if (d.rows != d_star.rows || d.cols != d_star.cols)
            throw DimensionError("error_series: derivative reference has wrong shape");
        double acc = 0.0;
        for (std::size_t i = 0; i < d.data.size(); ++i) {
            const double diff = d.data[i] - d_star.data[i];
            acc += diff * diff;
        }
        es.deriv_err.push_back(std::sqrt(acc));
    }
    return es;
}

RateReport fit_rate(const std::vector<double>& err, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw ParameterError("fit_rate: tail_fraction must be in (0, 1]");
    std::vector<long long> idx;
    for (std::size_t k = 0; k < err.size(); ++k)
        if (err[k] > kErrorFloor) idx.push_back(static_cast<long long>(k));
    if (idx.size() < 10)
        throw InsufficientDataError("fit_rate: fewer than 10 entries above the error floor");

    const std::size_t start =
        static_cast<std::size_t>(std::ceil(static_cast<double>(idx.size()) * (1.0 - tail_fraction)));
    if (start + 2 > idx.size())
        throw InsufficientDataError("fit_rate: tail window keeps fewer than 2 entries");

    // Plain least squares of log(err) against k over the kept indices.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double cnt = static_cast<double>(idx.size() - start);
    for (std::size_t i = start; i < idx.size(); ++i) {
        const double x = static_cast<double>(idx[i]);
        const double y = std::log(err[static_cast<std::size_t>(idx[i])]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = cnt * sxx - sx * sx;
    if (denom == 0.0) throw InsufficientDataError("fit_rate: degenerate abscissa");
    const double slope = (cnt * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / cnt;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / cnt;
    for (std::size_t i = start; i < idx.size(); ++i) {
        const double x = static_cast<double>(idx[i]);
        const double y = std::log(err[static_cast<std::size_t>(idx[i])]);
        const double pred = intercept + slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }

    RateReport rep;
    rep.fitted_rate = std::exp(slope);
    rep.window = {idx[start], idx.back()};
    rep.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return rep;
}

StepInequalityReport step_inequality_check(const std::vector<double>& deriv_err, double rho,
                                           long long start) {
    if (start < 0 || static_cast<std::size_t>(start) + 1 >= deriv_err.size())
        throw ParameterError("step_inequality_check: start index leaves no steps to check");
    StepInequalityReport rep;
    rep.start = start;
    const double tau = 2.0 * rho;
    for (std::size_t k = static_cast<std::size_t>(start); k + 1 < deriv_err.size(); ++k) {
        const double needed = (deriv_err[k + 1] - tau * deriv_err[k]) / (2.0 + deriv_err[k]);
        rep.eps_per_k.push_back(std::max(0.0, needed));
    }
    rep.min_eps = *std::max_element(rep.eps_per_k.begin(), rep.eps_per_k.end());
    return rep;
}

double envelope_bound(double err_at_start, double rho, double eps, const std::vector<double>& g,
                      long long start, long long k) {
    if (k < start) throw ParameterError("envelope_bound: k must be >= start");
    if (g.size() < static_cast<std::size_t>(k - start + 1))
        throw DimensionError("envelope_bound: g too short for requested k");
    const double tau = 2.0 * rho;
    double bound = err_at_start;
    double acc = 0.0;
    double tpow = 1.0;  // tau^{i-start}
    for (long long i = start; i <= k; ++i) {
        acc += tpow * g[static_cast<std::size_t>(i - start)];
        tpow *= tau;
    }
    // tpow is now tau^{k+1-start}.
    return tpow * bound + eps * acc;
}

Mat fd_derivative(const ProblemOracle& p, const Schedule& s, const Vec& theta, const Vec& x0,
                  long long k, double h) {
    if (!(h > 0.0)) throw ParameterError("fd_derivative: h must be positive");
    const int n = p.n;
    const int m = p.m;
    Mat out(2 * n, m);
    StopRule stop{k, 0.0};
    for (int c = 0; c < m; ++c) {
        Vec tp = theta, tm = theta;
        tp[c] += h;
        tm[c] -= h;
        RunTrace up = run(p, s, tp, x0, stop);
        RunTrace dn = run(p, s, tm, x0, stop);
        if (up.aborted_nonfinite || dn.aborted_nonfinite)
            throw NonFiniteError("fd_derivative: perturbed run diverged", k);
        const LiftedState& xu = up.snapshots.back();
        const LiftedState& xd = dn.snapshots.back();
        for (int i = 0; i < n; ++i) {
            out(i, c) = (xu.x[i] - xd.x[i]) / (2.0 * h);
            out(n + i, c) = (xu.z[i] - xd.z[i]) / (2.0 * h);
        }
    }
    return out;
}

namespace {

double rel_frob_diff(const Mat& a, const Mat& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        num += d * d;
        den += b.data[i] * b.data[i];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace

FullReport full_report(const ProblemOracle& p, const Schedule& s, const Vec& theta, const Vec& x0,
                       const Mat& dx0, long long max_iter, const ReportOptions& opts) {
    FullReport rep;
    rep.problem = p.name;
    rep.schedule = s.name;
    rep.lipschitz = p.lipschitz;

    // Fixed-point references: closed form when the problem has one, otherwise
    // a long solve with the same schedule.
    Vec xstar;
    if (p.has_minimizer()) {
        xstar = p.minimizer(theta);
        rep.xstar_source = "closed_form";
    } else {
        StopRule stop{std::max(max_iter * 10, 10000LL), 1e-12};
        RunTrace t = run(p, s, theta, x0, stop);
        if (t.snapshots.empty()) throw InsufficientDataError("full_report: empty reference run");
        xstar = t.snapshots.back().x;
        rep.xstar_source = "solved";
        rep.xstar_converged = t.converged;
    }
    const LiftedState x_star_lifted{xstar, xstar};
    Mat d_star;
    try {
        d_star = fixed_point_derivative(p, s.limits, theta, xstar);
    } catch (const SingularMatrixError&) {
        rep.dstar_available = false;
    }

    const LimitMatrixResult lm = limit_matrix(p, s.limits, theta, xstar);
    rep.rho = lm.rho;
    rep.eta_min = lm.eta.front();
    rep.eta_max = lm.eta.back();
    rep.envelope_contractive = 2.0 * lm.rho < 1.0;

    JointTrace jt = run_with_derivative(p, s, theta, x0, dx0, max_iter, &x_star_lifted,
                                        rep.dstar_available ? &d_star : nullptr);
    rep.iterations = jt.trace.iterations;
    rep.aborted_nonfinite = jt.trace.aborted_nonfinite;
    if (jt.trace.records.empty())
        throw NonFiniteError("full_report: diagnostics at the initial point are not finite", 0);
    rep.records = jt.trace.records;
    for (const TraceRecord& r : jt.trace.records) rep.iter_err.push_back(r.iter_err.value());
    rep.deriv_err = jt.deriv_err;
    rep.final_iter_err = rep.iter_err.back();
    rep.final_deriv_err = rep.deriv_err.empty() ? -1.0 : rep.deriv_err.back();

    // Burn-in K: first index at which the iterate error has dropped by the
    // configured factor; fall back to the midpoint if it never does.
    rep.burn_in_reached = false;
    const double err0 = rep.iter_err.front();
    for (std::size_t k = 0; k < rep.iter_err.size(); ++k)
        if (rep.iter_err[k] <= opts.burn_in_drop * err0) {
            rep.burn_in = static_cast<long long>(k);
            rep.burn_in_reached = true;
            break;
        }
    if (!rep.burn_in_reached) rep.burn_in = static_cast<long long>(rep.iter_err.size() / 2);

    try {
        RateReport rr = fit_rate(rep.iter_err, opts.tail_fraction);
        rr.theory_rate = rep.rho;
        rep.iter_rate = rr;
    } catch (const InsufficientDataError&) {
    }
    if (rep.dstar_available) {
        try {
            RateReport rr = fit_rate(rep.deriv_err, opts.tail_fraction);
            rr.theory_rate = rep.rho;
            rep.deriv_rate = rr;
        } catch (const InsufficientDataError&) {
        }
    }

    const std::size_t kcount = rep.iter_err.size();
    const std::size_t burn = static_cast<std::size_t>(rep.burn_in);
    if (rep.dstar_available && burn + 1 < rep.deriv_err.size()) {
        StepInequalityReport si = step_inequality_check(rep.deriv_err, rep.rho, rep.burn_in);
        rep.min_eps = si.min_eps;
        if (rep.iter_rate) rep.iter_rate->envelope_eps = si.min_eps;
        if (rep.deriv_rate) rep.deriv_rate->envelope_eps = si.min_eps;

        // Envelope at row k bounds deriv_err[k+1]; same formula as
        // envelope_bound, accumulated in O(1) per k.
        rep.theory_deriv_envelope.assign(kcount, -1.0);
        const double tau = 2.0 * rep.rho;
        const double err_k = rep.deriv_err[burn];
        double sum = 0.0;
        double wt = 1.0;     // tau^{k-K}
        double tpow = tau;   // tau^{k+1-K}
        for (std::size_t k = burn; k < kcount; ++k) {
            sum += wt * (2.0 + rep.deriv_err[k]);
            rep.theory_deriv_envelope[k] = tpow * err_k + rep.min_eps * sum;
            wt *= tau;
            tpow *= tau;
        }
    }

    rep.theory_iter_bound.assign(kcount, -1.0);
    const double ek = rep.iter_err[burn];
    double pw = 1.0;
    for (std::size_t k = burn; k < kcount; ++k) {
        rep.theory_iter_bound[k] = pw * ek;
        pw *= rep.rho;
    }

    rep.premise_b = check_premise_b(s, p.lipschitz, opts.premise_scan_k);
    rep.premise_c = check_premise_c(s, rep.eta_min);

    if (opts.fd_check) {
        const Mat fd = fd_derivative(p, s, theta, x0, static_cast<long long>(kcount) - 1, opts.fd_h);
        rep.fd_check_rel_err = rel_frob_diff(fd, jt.derivatives.back());
    }
    return rep;
}

}  // namespace imdiff
