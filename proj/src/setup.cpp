#include "imdiff/setup.hpp"

namespace imdiff {

namespace {

// "zeros"/"ones" or a number broadcast to all entries.
Vec broadcast_spec(const std::string& spec, int n, const char* key) {
    double v = 0.0;
    if (spec == "zeros") v = 0.0;
    else if (spec == "ones") v = 1.0;
    else {
        try {
            std::size_t pos = 0;
            v = std::stod(spec, &pos);
            if (pos != spec.size()) throw ParameterError("");
        } catch (...) {
            throw ParameterError(std::string("config: cannot parse ") + key + " spec '" + spec +
                                 "'");
        }
    }
    return Vec(static_cast<std::size_t>(n), v);
}

}  // namespace

Experiment make_experiment(const RunConfig& cfg) {
    Experiment ex;

    const Vec x_tilde = broadcast_spec(cfg.x_tilde, cfg.n, "x_tilde");
    ex.x0 = broadcast_spec(cfg.x0, cfg.n, "x0");

    if (cfg.problem == "quadratic") {
        ex.problem = quadratic_problem(cfg.n);
        ex.theta = Vec(static_cast<std::size_t>(cfg.n), cfg.theta);
        ex.lipschitz_source = "exact";
    } else if (cfg.problem == "least_squares") {
        LeastSquaresProblem ls{gaussian_matrix(cfg.m_rows, cfg.n, cfg.seed), x_tilde};
        ex.problem = least_squares_problem(ls, cfg.lipschitz_override);
        ex.theta = Vec{cfg.theta};
        ex.lipschitz_source = cfg.lipschitz_override > 0.0 ? "override" : "exact";
    } else if (cfg.problem == "logexp") {
        LogExpProblem le{gaussian_matrix(cfg.m_rows, cfg.n, cfg.seed), x_tilde};
        ex.problem = logexp_problem(le);
        ex.theta = Vec{cfg.theta};
        if (cfg.lipschitz_override > 0.0) {
            ex.problem.lipschitz = cfg.lipschitz_override;
            ex.lipschitz_source = "override";
        } else {
            // Local curvature estimate in a box around the initializer; the
            // sampling stream is offset so it never aliases the instance draw.
            ex.problem.lipschitz =
                estimate_local_lipschitz(ex.problem, ex.x0, Vec{cfg.theta},
                                         cfg.lipschitz_box_radius, cfg.lipschitz_samples,
                                         cfg.seed + 0x51ED270Bull);
            ex.lipschitz_source = "sampled_box";
        }
    } else {
        throw ParameterError("make_experiment: unknown problem '" + cfg.problem + "'");
    }

    ScheduleParams sp;
    sp.gamma = cfg.gamma;
    sp.a = cfg.momentum;
    sp.c = cfg.nesterov_offset;
    ex.schedule = preset(cfg.schedule, ex.problem.lipschitz, sp);
    if (cfg.force_unit_inertia_at_0) ex.schedule = ex.schedule.with_unit_initial_inertia();

    ex.dx0 = Mat(cfg.n, ex.problem.m);
    const Vec dvals = broadcast_spec(cfg.dx0, cfg.n, "dx0");
    for (int i = 0; i < cfg.n; ++i)
        for (int c = 0; c < ex.problem.m; ++c) ex.dx0(i, c) = dvals[static_cast<std::size_t>(i)];

    return ex;
}

}  // namespace imdiff
