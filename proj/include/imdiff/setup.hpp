#pragma once

#include "imdiff/config.hpp"
#include "imdiff/problem.hpp"
#include "imdiff/schedule.hpp"

namespace imdiff {

// A fully materialized experiment: problem oracle, schedule and initial data,
// instantiated deterministically from a RunConfig.
struct Experiment {
    ProblemOracle problem;
    Schedule schedule;
    Vec theta;  // broadcast to the problem's parameter dimension
    Vec x0;
    Mat dx0;
    std::string lipschitz_source;  // "exact", "override" or "sampled_box"
};

Experiment make_experiment(const RunConfig& cfg);

}  // namespace imdiff
