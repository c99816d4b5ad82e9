#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "imdiff/linalg.hpp"

namespace imdiff {

// Limits (a, b, gamma) of an inertial schedule as k -> infinity.
struct ScheduleLimits {
    double a = 0.0;
    double b = 0.0;
    double gamma = 0.0;
};

// Inertial parameter sequences a_k, b_k and step sizes gamma_k.  Accessors
// are pure functions of k so schedules can be shared across runs.
struct Schedule {
    std::string name;
    std::function<double(long long)> a_at;
    std::function<double(long long)> b_at;
    std::function<double(long long)> gamma_at;
    ScheduleLimits limits;

    // Returns a copy whose first step uses a_0 = b_0 = 1 (the textbook
    // initialization); irrelevant in exact arithmetic when x_0 = z_0 but
    // exposed for sensitivity experiments.
    Schedule with_unit_initial_inertia() const;
};

// Optional knobs for the presets; fields are ignored by presets that do not
// use them.
struct ScheduleParams {
    double gamma = 0.0;   // constant step override; 0 means the preset default
    double a = 0.5;       // heavy-ball momentum
    double c = 3.0;       // nesterov offset, must be >= 3
};

// Named presets.  `lipschitz` is the gradient Lipschitz constant L of the
// objective the schedule will drive; defaults are expressed through it.
//
//   gradient_descent  a = b = 0,                gamma = 1/L
//   heavy_ball        a = params.a, b = 0,      gamma = 1/L
//   nesterov_c        a_k = b_k = (k-1)/(k+c),  gamma = 1/L
//   example1          a = b = sqrt(5) - 2 - 1e-3, gamma = 1/L
//   example2          a_k = b_k = (k-1)/(k+25), gamma = 1/L
//   case1             a_k = b_k = (k-1)/(k+20), gamma_k = 1/(L - 2/k)
//   case2             a = b = 0,                gamma_k = 1/(L - 2/k)
//
// Inertia values are clamped to [0, 1].  The varying step sizes of case1 and
// case2 are clamped to [1/(2L), 1.99/L], with gamma_0 = 1/L.
Schedule preset(const std::string& name, double lipschitz, const ScheduleParams& params = {});

// Number of k in [0, horizon] at which the preset's raw step size fell
// outside the clamp interval (always 0 for the constant-step presets).
long long count_gamma_clamps(const std::string& name, double lipschitz, long long horizon,
                             const ScheduleParams& params = {});

// Result of scanning the step-size/inertia inequality that the convergence
// analysis needs (two admissible branches per k; see check_premise_b).
struct PremiseBReport {
    bool satisfied_all = false;
    // 0 = no branch admissible, 1/2 = branch giving the best margin at k.
    std::vector<std::int8_t> branch_per_k;
    std::optional<long long> first_violation;  // first k with margin <= 0
    double max_tau = 0.0;                      // infimum over k of the best margin
};

// Scans k = 0..k_max.  At each k, branch (i) requires a_k < (gamma_k L/2) b_k
// and yields margin (1 + a_k) - (gamma_k L/2)(1 + b_k)^2; branch (ii) applies
// when b_k <= a_k or (gamma_k L/2) b_k <= a_k < b_k and yields margin
// (1 - 3 a_k) - (gamma_k L/2)(1 - b_k)^2.  The premise holds at k if some
// admissible branch has a positive margin.  Diagnostic only: callers warn on
// violation rather than refuse to run.
PremiseBReport check_premise_b(const Schedule& s, double lipschitz, long long k_max);

struct PremiseCReport {
    bool holds = false;
    double lhs = 0.0;        // (2(b - a) - 1) / (1 + 2 b)
    bool applicable = true;  // false when (a, b) lies outside [0, 1)^2
};

// Limit condition (2(b-a)-1)/(1+2b) < eta_min guaranteeing the limit
// iteration matrix is a contraction; stated for limits in [0,1)^2, so a
// boundary limit like a = b = 1 is flagged not applicable but still measured.
PremiseCReport check_premise_c(const Schedule& s, double eta_min);

}  // namespace imdiff
