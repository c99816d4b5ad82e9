#include "imdiff/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace imdiff {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw ParameterError("config: trailing junk in value of " + key);
        return x;
    } catch (const ParameterError&) {
        throw;
    } catch (...) {
        throw ParameterError("config: cannot parse number for key " + key);
    }
}

long long to_ll(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw ParameterError("config: trailing junk in value of " + key);
        return x;
    } catch (const ParameterError&) {
        throw;
    } catch (...) {
        throw ParameterError("config: cannot parse integer for key " + key);
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw ParameterError("config: trailing junk in value of " + key);
        return x;
    } catch (const ParameterError&) {
        throw;
    } catch (...) {
        throw ParameterError("config: cannot parse integer for key " + key);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParameterError("config: cannot parse boolean for key " + key);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config: line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ParameterError("config: empty key or value on line " + std::to_string(lineno));

        if (key == "problem") c.problem = val;
        else if (key == "n") c.n = static_cast<int>(to_ll(key, val));
        else if (key == "m_rows") c.m_rows = static_cast<int>(to_ll(key, val));
        else if (key == "seed") c.seed = to_u64(key, val);
        else if (key == "theta") c.theta = to_double(key, val);
        else if (key == "x_tilde") c.x_tilde = val;
        else if (key == "lipschitz_override") c.lipschitz_override = to_double(key, val);
        else if (key == "lipschitz_box_radius") c.lipschitz_box_radius = to_double(key, val);
        else if (key == "lipschitz_samples") c.lipschitz_samples = static_cast<int>(to_ll(key, val));
        else if (key == "schedule") c.schedule = val;
        else if (key == "gamma") c.gamma = to_double(key, val);
        else if (key == "momentum") c.momentum = to_double(key, val);
        else if (key == "nesterov_offset") c.nesterov_offset = to_double(key, val);
        else if (key == "force_unit_inertia_at_0") c.force_unit_inertia_at_0 = to_bool(key, val);
        else if (key == "max_iter") c.max_iter = to_ll(key, val);
        else if (key == "grad_tol") c.grad_tol = to_double(key, val);
        else if (key == "x0") c.x0 = val;
        else if (key == "dx0") c.dx0 = val;
        else if (key == "tail_fraction") c.tail_fraction = to_double(key, val);
        else if (key == "burn_in_drop") c.burn_in_drop = to_double(key, val);
        else if (key == "fd_check") c.fd_check = to_bool(key, val);
        else if (key == "fd_h") c.fd_h = to_double(key, val);
        else if (key == "out_dir") c.out_dir = val;
        else if (key == "csv") c.csv = to_bool(key, val);
        else if (key == "snapshot_every") c.snapshot_every = to_ll(key, val);
        else throw ParameterError("config: unknown key '" + key + "'");
    }
    if (c.problem != "quadratic" && c.problem != "least_squares" && c.problem != "logexp")
        throw ParameterError("config: unknown problem '" + c.problem + "'");
    if (c.n <= 0) throw ParameterError("config: n must be positive");
    if (c.m_rows <= 0) throw ParameterError("config: m_rows must be positive");
    if (c.max_iter < 1) throw ParameterError("config: max_iter must be >= 1");
    if (c.snapshot_every < 1) throw ParameterError("config: snapshot_every must be >= 1");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "problem = " << c.problem << '\n'
        << "n = " << c.n << '\n'
        << "m_rows = " << c.m_rows << '\n'
        << "seed = " << c.seed << '\n'
        << "theta = " << fmt(c.theta) << '\n'
        << "x_tilde = " << c.x_tilde << '\n'
        << "lipschitz_override = " << fmt(c.lipschitz_override) << '\n'
        << "lipschitz_box_radius = " << fmt(c.lipschitz_box_radius) << '\n'
        << "lipschitz_samples = " << c.lipschitz_samples << '\n'
        << "schedule = " << c.schedule << '\n'
        << "gamma = " << fmt(c.gamma) << '\n'
        << "momentum = " << fmt(c.momentum) << '\n'
        << "nesterov_offset = " << fmt(c.nesterov_offset) << '\n'
        << "force_unit_inertia_at_0 = " << (c.force_unit_inertia_at_0 ? "true" : "false") << '\n'
        << "max_iter = " << c.max_iter << '\n'
        << "grad_tol = " << fmt(c.grad_tol) << '\n'
        << "x0 = " << c.x0 << '\n'
        << "dx0 = " << c.dx0 << '\n'
        << "tail_fraction = " << fmt(c.tail_fraction) << '\n'
        << "burn_in_drop = " << fmt(c.burn_in_drop) << '\n'
        << "fd_check = " << (c.fd_check ? "true" : "false") << '\n'
        << "fd_h = " << fmt(c.fd_h) << '\n'
        << "out_dir = " << c.out_dir << '\n'
        << "csv = " << (c.csv ? "true" : "false") << '\n'
        << "snapshot_every = " << c.snapshot_every << '\n';
    return out.str();
}

}  // namespace imdiff
