#include "imdiff/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace imdiff {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trace_csv(const std::vector<TraceRecord>& records, const std::vector<double>* deriv_err,
                      const std::vector<double>* theory_iter_bound,
                      const std::vector<double>* theory_deriv_envelope) {
    std::ostringstream out;
    out << kTraceCsvHeader << '\n';
    auto series_field = [&](const std::vector<double>* s, std::size_t i) -> std::string {
        if (!s || i >= s->size() || (*s)[i] < 0.0) return "";
        return format_double((*s)[i]);
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        out << r.k << ',' << format_double(r.f) << ',' << format_double(r.grad_norm) << ',';
        if (r.iter_err) out << format_double(*r.iter_err);
        out << ',' << series_field(deriv_err, i) << ',' << series_field(theory_iter_bound, i)
            << ',' << series_field(theory_deriv_envelope, i) << ',' << format_double(r.a) << ','
            << format_double(r.b) << ',' << format_double(r.gamma) << '\n';
    }
    return out.str();
}

namespace {

nlohmann::json rate_json(const std::optional<RateReport>& r) {
    if (!r) return nullptr;
    return {{"fitted_rate", r->fitted_rate},
            {"window_start", r->window.first},
            {"window_end", r->window.second},
            {"r_squared", r->r_squared},
            {"theory_rate", r->theory_rate},
            {"envelope_eps", r->envelope_eps}};
}

}  // namespace

std::string summary_json(const FullReport& rep, const RunConfig& cfg) {
    nlohmann::json j;
    j["problem"] = rep.problem;
    j["schedule"] = rep.schedule;
    j["lipschitz"] = rep.lipschitz;
    j["rho"] = rep.rho;
    j["eta_min"] = rep.eta_min;
    j["eta_max"] = rep.eta_max;
    j["iterations"] = rep.iterations;
    j["burn_in"] = rep.burn_in;
    j["burn_in_reached"] = rep.burn_in_reached;
    j["min_eps"] = rep.min_eps;
    j["envelope_contractive"] = rep.envelope_contractive;
    j["iter_rate"] = rate_json(rep.iter_rate);
    j["deriv_rate"] = rate_json(rep.deriv_rate);
    j["premise_b"] = {{"satisfied_all", rep.premise_b.satisfied_all},
                      {"max_tau", rep.premise_b.max_tau},
                      {"first_violation", rep.premise_b.first_violation
                                              ? nlohmann::json(*rep.premise_b.first_violation)
                                              : nlohmann::json(nullptr)}};
    j["premise_c"] = {{"holds", rep.premise_c.holds},
                      {"lhs", rep.premise_c.lhs},
                      {"applicable", rep.premise_c.applicable}};
    j["xstar_source"] = rep.xstar_source;
    j["xstar_converged"] = rep.xstar_converged;
    j["dstar_available"] = rep.dstar_available;
    j["aborted_nonfinite"] = rep.aborted_nonfinite;
    j["final_iter_err"] = rep.final_iter_err;
    j["final_deriv_err"] = rep.final_deriv_err;
    j["fd_check_rel_err"] = rep.fd_check_rel_err;
    // Defaults here (instance size, seed) are artifact choices, recorded so
    // the outputs are self-describing.
    j["config"] = {{"problem", cfg.problem},
                   {"n", cfg.n},
                   {"m_rows", cfg.m_rows},
                   {"seed", cfg.seed},
                   {"seed_note", "artifact default, not a reference value"},
                   {"theta", cfg.theta},
                   {"x_tilde", cfg.x_tilde},
                   {"schedule", cfg.schedule},
                   {"gamma", cfg.gamma},
                   {"momentum", cfg.momentum},
                   {"nesterov_offset", cfg.nesterov_offset},
                   {"force_unit_inertia_at_0", cfg.force_unit_inertia_at_0},
                   {"max_iter", cfg.max_iter},
                   {"grad_tol", cfg.grad_tol},
                   {"x0", cfg.x0},
                   {"dx0", cfg.dx0},
                   {"tail_fraction", cfg.tail_fraction},
                   {"burn_in_drop", cfg.burn_in_drop},
                   {"fd_check", cfg.fd_check},
                   {"fd_h", cfg.fd_h},
                   {"lipschitz_override", cfg.lipschitz_override},
                   {"lipschitz_box_radius", cfg.lipschitz_box_radius},
                   {"lipschitz_samples", cfg.lipschitz_samples},
                   {"snapshot_every", cfg.snapshot_every}};
    return j.dump(2) + "\n";
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_text_atomic: cannot open " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write_text_atomic: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace imdiff
