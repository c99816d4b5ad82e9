#include "imdiff/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imdiff {

namespace {

double clamp_inertia(double v) { return std::clamp(v, 0.0, 1.0); }

// Raw (unclamped) case1/case2 step size: 1/L at k = 0, then 1/(L - 2/k).
double case_gamma_raw(long long k, double lip) {
    if (k == 0) return 1.0 / lip;
    return 1.0 / (lip - 2.0 / static_cast<double>(k));
}

double case_gamma(long long k, double lip) {
    const double lo = 1.0 / (2.0 * lip);
    const double hi = 1.99 / lip;
    return std::clamp(case_gamma_raw(k, lip), lo, hi);
}

double fraction_schedule(long long k, double offset) {
    return clamp_inertia(static_cast<double>(k - 1) / (static_cast<double>(k) + offset));
}

}  // namespace

Schedule Schedule::with_unit_initial_inertia() const {
    Schedule s = *this;
    auto a = a_at;
    auto b = b_at;
    s.a_at = [a](long long k) { return k == 0 ? 1.0 : a(k); };
    s.b_at = [b](long long k) { return k == 0 ? 1.0 : b(k); };
    return s;
}

Schedule preset(const std::string& name, double lipschitz, const ScheduleParams& params) {
    if (!(lipschitz > 0.0)) throw ParameterError("preset: lipschitz constant must be positive");
    const double lip = lipschitz;
    const double gamma_const = params.gamma > 0.0 ? params.gamma : 1.0 / lip;

    Schedule s;
    s.name = name;
    auto constant = [](double v) { return [v](long long) { return v; }; };

    if (name == "gradient_descent") {
        s.a_at = constant(0.0);
        s.b_at = constant(0.0);
        s.gamma_at = constant(gamma_const);
        s.limits = {0.0, 0.0, gamma_const};
    } else if (name == "heavy_ball") {
        const double a = clamp_inertia(params.a);
        s.a_at = constant(a);
        s.b_at = constant(0.0);
        s.gamma_at = constant(gamma_const);
        s.limits = {a, 0.0, gamma_const};
    } else if (name == "nesterov_c") {
        if (!(params.c >= 3.0)) throw ParameterError("preset: nesterov_c requires c >= 3");
        const double c = params.c;
        s.a_at = [c](long long k) { return fraction_schedule(k, c); };
        s.b_at = s.a_at;
        s.gamma_at = constant(gamma_const);
        s.limits = {1.0, 1.0, gamma_const};
    } else if (name == "example1") {
        const double a = std::sqrt(5.0) - 2.0 - 1e-3;
        s.a_at = constant(a);
        s.b_at = constant(a);
        s.gamma_at = constant(1.0 / lip);
        s.limits = {a, a, 1.0 / lip};
    } else if (name == "example2") {
        s.a_at = [](long long k) { return fraction_schedule(k, 25.0); };
        s.b_at = s.a_at;
        s.gamma_at = constant(1.0 / lip);
        s.limits = {1.0, 1.0, 1.0 / lip};
    } else if (name == "case1") {
        s.a_at = [](long long k) { return fraction_schedule(k, 20.0); };
        s.b_at = s.a_at;
        s.gamma_at = [lip](long long k) { return case_gamma(k, lip); };
        s.limits = {1.0, 1.0, 1.0 / lip};
    } else if (name == "case2") {
        s.a_at = constant(0.0);
        s.b_at = constant(0.0);
        s.gamma_at = [lip](long long k) { return case_gamma(k, lip); };
        s.limits = {0.0, 0.0, 1.0 / lip};
    } else {
        throw ParameterError("preset: unknown schedule '" + name + "'");
    }
    return s;
}

long long count_gamma_clamps(const std::string& name, double lipschitz, long long horizon,
                             const ScheduleParams&) {
    if (name != "case1" && name != "case2") return 0;
    if (!(lipschitz > 0.0)) throw ParameterError("count_gamma_clamps: lipschitz must be positive");
    const double lo = 1.0 / (2.0 * lipschitz);
    const double hi = 1.99 / lipschitz;
    long long count = 0;
    for (long long k = 0; k <= horizon; ++k) {
        const double raw = case_gamma_raw(k, lipschitz);
        if (raw < lo || raw > hi) ++count;
    }
    return count;
}

PremiseBReport check_premise_b(const Schedule& s, double lipschitz, long long k_max) {
    if (!(lipschitz > 0.0)) throw ParameterError("check_premise_b: lipschitz must be positive");
    PremiseBReport rep;
    rep.branch_per_k.reserve(static_cast<std::size_t>(k_max) + 1);
    rep.max_tau = std::numeric_limits<double>::infinity();
    rep.satisfied_all = true;

    for (long long k = 0; k <= k_max; ++k) {
        const double a = s.a_at(k);
        const double b = s.b_at(k);
        const double half_gl = 0.5 * s.gamma_at(k) * lipschitz;

        double margin = -std::numeric_limits<double>::infinity();
        std::int8_t branch = 0;
        if (a < half_gl * b) {
            margin = (1.0 + a) - half_gl * (1.0 + b) * (1.0 + b);
            branch = 1;
        }
        if (b <= a || (half_gl * b <= a && a < b)) {
            const double m2 = (1.0 - 3.0 * a) - half_gl * (1.0 - b) * (1.0 - b);
            if (m2 > margin) {
                margin = m2;
                branch = 2;
            }
        }
        rep.branch_per_k.push_back(branch);
        rep.max_tau = std::min(rep.max_tau, margin);
        if (!(margin > 0.0)) {
            rep.satisfied_all = false;
            if (!rep.first_violation) rep.first_violation = k;
        }
    }
    return rep;
}

PremiseCReport check_premise_c(const Schedule& s, double eta_min) {
    PremiseCReport rep;
    const double a = s.limits.a;
    const double b = s.limits.b;
    rep.lhs = (2.0 * (b - a) - 1.0) / (1.0 + 2.0 * b);
    rep.holds = rep.lhs < eta_min;
    rep.applicable = a >= 0.0 && a < 1.0 && b >= 0.0 && b < 1.0;
    return rep;
}

}  // namespace imdiff
