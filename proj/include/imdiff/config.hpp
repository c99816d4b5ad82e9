#pragma once

#include <cstdint>
#include <string>

#include "imdiff/errors.hpp"

namespace imdiff {

// Flat key = value run configuration.  '#' starts a comment; unknown keys are
// rejected so typos cannot silently fall back to defaults.
struct RunConfig {
    // problem
    std::string problem = "least_squares";  // quadratic | least_squares | logexp
    int n = 20;
    int m_rows = 50;
    std::uint64_t seed = 575;  // artifact default, not a reference value
    double theta = 1.0;
    std::string x_tilde = "ones";  // "ones" or a number broadcast to all entries
    double lipschitz_override = 0.0;
    double lipschitz_box_radius = 1.0;  // logexp local curvature sampling box
    int lipschitz_samples = 32;

    // schedule
    std::string schedule = "case1";
    double gamma = 0.0;  // constant-step override; 0 keeps the preset default
    double momentum = 0.5;
    double nesterov_offset = 3.0;
    bool force_unit_inertia_at_0 = false;

    // solver
    long long max_iter = 400;
    double grad_tol = 0.0;
    std::string x0 = "zeros";   // "zeros" or a number broadcast
    std::string dx0 = "zeros";  // "zeros" or a number broadcast

    // analysis
    double tail_fraction = 0.25;
    double burn_in_drop = 1e-3;
    bool fd_check = false;
    double fd_h = 1e-5;

    // output
    std::string out_dir = "out";
    bool csv = true;
    long long snapshot_every = 1;
};

// Parses the flat file format.  Throws ParameterError on syntax errors,
// unknown keys or unparseable values.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical serialization: every key on its own line, fixed order, values
// formatted losslessly.  parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

}  // namespace imdiff
