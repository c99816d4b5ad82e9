#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "imdiff/analysis.hpp"
#include "imdiff/checks.hpp"
#include "imdiff/io.hpp"
#include "imdiff/setup.hpp"

namespace {

namespace fs = std::filesystem;
using namespace imdiff;

// Output directory precedence: --out flag, then IMDIFF_OUT_DIR, then config.
std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("IMDIFF_OUT_DIR"); env && *env) return env;
    return config_value;
}

struct RunArtifacts {
    FullReport report;
    std::string csv;
    std::string summary;
};

RunArtifacts execute(const RunConfig& cfg) {
    Experiment ex = make_experiment(cfg);

    ReportOptions opts;
    opts.tail_fraction = cfg.tail_fraction;
    opts.burn_in_drop = cfg.burn_in_drop;
    opts.premise_scan_k = std::max<long long>(cfg.max_iter, 400);
    opts.fd_check = cfg.fd_check;
    opts.fd_h = cfg.fd_h;

    RunArtifacts art;
    art.report = full_report(ex.problem, ex.schedule, ex.theta, ex.x0, ex.dx0, cfg.max_iter, opts);
    art.csv = trace_csv(art.report.records,
                        art.report.dstar_available ? &art.report.deriv_err : nullptr,
                        &art.report.theory_iter_bound, &art.report.theory_deriv_envelope);
    art.summary = summary_json(art.report, cfg);
    return art;
}

int cmd_run(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
            const std::string& out_flag) {
    RunConfig cfg = load_config(config_path);
    if (has_seed) cfg.seed = seed_override;
    const std::string out_dir = resolve_out_dir(out_flag, cfg.out_dir);

    RunArtifacts art = execute(cfg);
    if (cfg.csv) write_text_atomic((fs::path(out_dir) / "trace.csv").string(), art.csv);
    write_text_atomic((fs::path(out_dir) / "summary.json").string(), art.summary);

    std::cout << "problem=" << art.report.problem << " schedule=" << art.report.schedule
              << " rho=" << format_double(art.report.rho)
              << " final_iter_err=" << format_double(art.report.final_iter_err)
              << " final_deriv_err=" << format_double(art.report.final_deriv_err) << '\n';
    if (!art.report.premise_b.satisfied_all) {
        std::cout << "WARNING: premise B violated (first k = "
                  << (art.report.premise_b.first_violation
                          ? std::to_string(*art.report.premise_b.first_violation)
                          : std::string("?"))
                  << "); convergence guarantee does not apply, run continued\n";
    }
    if (art.report.aborted_nonfinite) {
        std::cerr << "error: iteration produced a non-finite value; partial trace written to "
                  << out_dir << '\n';
        return 3;
    }
    std::cout << "wrote " << (fs::path(out_dir) / "trace.csv").string() << " and summary.json\n";
    return 0;
}

// The two schedules of the reference experiment on the same seeded instance;
// four plot panels = {case1, case2} x {iterate error, derivative error}.
int cmd_reproduce_fig1(const std::string& out_flag) {
    const std::string out_dir = resolve_out_dir(out_flag, "fig1_out");
    for (const std::string sched : {"case1", "case2"}) {
        RunConfig cfg;  // defaults: least_squares n=20 m_rows=50 seed=575 theta=1
        cfg.schedule = sched;
        cfg.max_iter = 400;
        RunArtifacts art = execute(cfg);
        write_text_atomic((fs::path(out_dir) / (sched + "_trace.csv")).string(), art.csv);
        write_text_atomic((fs::path(out_dir) / (sched + "_summary.json")).string(), art.summary);
        std::cout << sched << ": rho=" << format_double(art.report.rho)
                  << " fitted_iter_rate="
                  << (art.report.iter_rate ? format_double(art.report.iter_rate->fitted_rate)
                                           : std::string("n/a"))
                  << " fitted_deriv_rate="
                  << (art.report.deriv_rate ? format_double(art.report.deriv_rate->fitted_rate)
                                            : std::string("n/a"))
                  << " final_deriv_err=" << format_double(art.report.final_deriv_err) << '\n';
        if (art.report.aborted_nonfinite) {
            std::cerr << "error: " << sched << " aborted on a non-finite value\n";
            return 3;
        }
    }
    std::cout << "wrote 2 trace CSVs and 2 summaries to " << out_dir << '\n';
    return 0;
}

int cmd_check(const std::string& config_path) {
    const RunConfig cfg = load_config(config_path);
    const std::vector<CheckResult> results = run_check_suite(cfg);
    const CheckResult* first_fail = nullptr;
    for (const CheckResult& r : results) {
        const bool gate_fail = !r.pass && !r.warn_only;
        const char* tag = r.pass ? "[ok]  " : (r.warn_only ? "[WARN]" : "[FAIL]");
        std::cout << tag << ' ' << r.name << ": " << r.detail << '\n';
        if (gate_fail && !first_fail) first_fail = &r;
    }
    if (first_fail) {
        std::cerr << "check failed: " << first_fail->name << " (" << first_fail->detail << ")\n";
        return 1;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inertial-method solver with forward-mode parameter derivatives"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;

    CLI::App* runc = app.add_subcommand("run", "Run one configured experiment");
    runc->add_option("--config", config_path, "Config file (flat key = value)")->required();
    CLI::Option* seed_opt = runc->add_option("--seed", seed, "Override the config seed");
    runc->add_option("--out", out_dir, "Output directory (overrides config and IMDIFF_OUT_DIR)");

    CLI::App* fig1 = app.add_subcommand("reproduce-fig1",
                                        "Reproduce the reference least-squares experiment");
    fig1->add_option("--out", out_dir, "Output directory");

    CLI::App* check = app.add_subcommand("check", "Run the invariant suite for a config");
    check->add_option("--config", config_path, "Config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (runc->parsed()) return cmd_run(config_path, seed, seed_opt->count() > 0, out_dir);
        if (fig1->parsed()) return cmd_reproduce_fig1(out_dir);
        if (check->parsed()) return cmd_check(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
