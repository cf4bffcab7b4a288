#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "nf/config.hpp"
#include "nf/report.hpp"
#include "nf/selftest.hpp"
#include "nf/sync.hpp"
#include "nf/system_solver.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 1;
constexpr int exit_solver_failure = 2;

std::uint64_t effective_seed(std::uint64_t config_seed) {
    if (const char* env = std::getenv("NEHARI_FORGE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw nf::ConfigError("NEHARI_FORGE_SEED must be a nonnegative integer");
        }
    }
    return config_seed;
}

void print_warnings(const nf::SystemParams& params) {
    for (const std::string& w : params.warnings()) std::cerr << "warning: " << w << "\n";
}

std::filesystem::path out_path(const std::string& dir, const std::string& prefix,
                               const std::string& suffix) {
    return std::filesystem::path(dir) / (prefix + suffix);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw nf::Error("cannot write '" + path.string() + "'");
    out << text;
}

nlohmann::json meta_json(const std::string& command, std::uint64_t seed) {
    nlohmann::json j;
    j["command"] = command;
    j["seed"] = seed;
    j["timestamp"] = nf::timestamp_utc();
    return j;
}

void write_state_fields(const nf::State& u, const std::string& dir, const std::string& prefix) {
    for (int i = 0; i < u.size(); ++i) {
        std::ofstream out(out_path(dir, prefix, "_u" + std::to_string(i + 1) + ".csv"));
        nf::write_csv(u[i], out);
    }
}

int run_solve(const std::string& config_path, double t_target, const std::string& out_dir) {
    if (!(t_target >= 0.0 && t_target <= 1.0))
        throw nf::ConfigError("--t must lie in [0, 1]");
    const nf::RunConfig rc = nf::load_run_config(config_path);
    const std::uint64_t seed = effective_seed(rc.seed);
    print_warnings(rc.params);

    nlohmann::json j = meta_json("solve", seed);
    j["config"] = config_path;

    int exit_code = exit_ok;
    try {
        const nf::ContinuationResult run =
            nf::continue_in_t(rc.params, rc.domain, rc.solver, t_target);
        nf::SolveReport report = nf::verify_solution(rc.params, run.solution, t_target);
        for (const nf::TraceRow& row : run.trace) report.iterations += row.newton_iterations;

        j["report"] = nf::report_to_json(report);
        j["max_inf_norm"] = run.max_inf_norm;
        j["r_guard"] = run.r_guard;

        write_state_fields(run.solution, out_dir, rc.output_prefix);
        std::ofstream trace(out_path(out_dir, rc.output_prefix, "_trace.csv"));
        nf::write_trace_csv(run.trace, trace);

        exit_code = report.converged ? exit_ok : exit_solver_failure;
    } catch (const nf::Error& e) {
        j["error"] = e.what();
        exit_code = exit_solver_failure;
    }

    write_text_file(out_path(out_dir, rc.output_prefix, "_report.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return exit_code;
}

int run_scaling_solve(int ell, double p, const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<double>& d, const std::vector<double>& alpha,
                      const std::vector<double>& beta) {
    nf::ScalingCoeffs c;
    c.ell = ell;
    c.p = p;
    c.a = a;
    c.b = b;
    const auto nn = static_cast<std::size_t>(ell) * ell;
    c.d = d.empty() ? std::vector<double>(nn, 0.0) : d;
    c.alpha = alpha.empty() ? std::vector<double>(nn, 1.0) : alpha;
    c.beta = beta.empty() ? std::vector<double>(nn, 1.0) : beta;
    for (int i = 0; i < ell; ++i) {
        c.alpha[static_cast<std::size_t>(i) * ell + i] = 1.0;
        c.beta[static_cast<std::size_t>(i) * ell + i] = 1.0;
        c.d[static_cast<std::size_t>(i) * ell + i] = 0.0;
    }
    try {
        c.validate();
    } catch (const nf::InvalidParamsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config_error;
    }

    nlohmann::json j = meta_json("scaling-solve", 0);
    try {
        const std::vector<double> s = nf::solve_scaling(c);
        const int sign = nf::degree_sign_check(c, s);
        const std::vector<double> residual = nf::eval_scaling_map(c, s);
        double worst = 0.0;
        for (double r : residual) worst = std::max(worst, std::abs(r));
        j["s"] = s;
        j["degree_sign"] = sign;
        j["degenerate"] = sign == 0;
        j["max_residual"] = worst;
        std::cout << j.dump(2) << "\n";
        return exit_ok;
    } catch (const nf::Error& e) {
        j["error"] = e.what();
        std::cout << j.dump(2) << "\n";
        return exit_solver_failure;
    }
}

int run_sync_check(const std::string& config_path) {
    const nf::RunConfig rc = nf::load_run_config(config_path);
    const nf::SyncVerdict verdict = nf::sync_criterion(rc.params);
    nlohmann::json j = meta_json("sync-check", effective_seed(rc.seed));
    j["verdict"] = nf::verdict_to_json(verdict);
    std::cout << j.dump(2) << "\n";
    return exit_ok;
}

int run_sync_solve(const std::string& config_path, const std::string& out_dir) {
    const nf::RunConfig rc = nf::load_run_config(config_path);
    const std::uint64_t seed = effective_seed(rc.seed);
    const nf::SyncVerdict verdict = nf::sync_criterion(rc.params);

    nlohmann::json j = meta_json("sync-solve", seed);
    j["verdict"] = nf::verdict_to_json(verdict);

    int exit_code = exit_ok;
    if (!verdict.holds) {
        j["error"] = "criterion fails: " + verdict.failure_reason;
        exit_code = exit_solver_failure;
    } else {
        try {
            const nf::State pair = nf::sync_solve(rc.params, rc.domain);
            nf::SolveReport report = nf::verify_solution(rc.params, pair, 1.0);
            j["report"] = nf::report_to_json(report);
            write_state_fields(pair, out_dir, rc.output_prefix);
            exit_code = report.relative_residual <= 1e-7 ? exit_ok : exit_solver_failure;
        } catch (const nf::Error& e) {
            j["error"] = e.what();
            exit_code = exit_solver_failure;
        }
    }
    write_text_file(out_path(out_dir, rc.output_prefix, "_sync.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return exit_code;
}

int run_sweep(const std::string& config_path, const std::string& out_dir) {
    const nf::RunConfig rc = nf::load_run_config(config_path);
    print_warnings(rc.params);
    if (rc.sweep_multipliers.empty())
        throw nf::ConfigError(config_path + ": sweep-lambda needs [sweep] multipliers");

    std::vector<nf::SweepPoint> points;
    try {
        points = nf::lambda_sweep(rc.params, rc.sweep_multipliers, rc.domain, rc.solver);
    } catch (const nf::InvalidParamsError&) {
        throw;
    } catch (const nf::Error& e) {
        // The base solve failed: record every point as failed.
        for (double kappa : rc.sweep_multipliers) {
            nf::SweepPoint pt;
            pt.multiplier = kappa;
            pt.error = e.what();
            points.push_back(std::move(pt));
        }
    }

    std::ofstream csv(out_path(out_dir, rc.output_prefix, "_sweep.csv"));
    nf::write_sweep_csv(points, csv);

    nlohmann::json j = meta_json("sweep-lambda", effective_seed(rc.seed));
    int failed = 0;
    for (const nf::SweepPoint& pt : points) failed += pt.converged ? 0 : 1;
    j["points"] = points.size();
    j["failed_points"] = failed;
    std::cout << j.dump(2) << "\n";
    return exit_ok;
}

int run_unbounded(const std::string& config_path, const std::string& out_dir) {
    const nf::RunConfig rc = nf::load_run_config(config_path);
    if (rc.unbounded.a_list.empty())
        throw nf::ConfigError(config_path + ": unbounded needs [unbounded] a_list");

    const nf::UnboundedResult result = nf::unboundedness_experiment(
        rc.unbounded.mu, rc.params.p, rc.unbounded.q, rc.unbounded.a_list, rc.domain, rc.workers);

    std::ofstream csv(out_path(out_dir, rc.output_prefix, "_unbounded.csv"));
    nf::write_unbounded_csv(result, csv);

    nlohmann::json j = meta_json("unbounded", effective_seed(rc.seed));
    j["rows"] = result.rows.size();
    j["norms_strictly_increasing"] = result.norms_strictly_increasing;
    j["nehari_identity_ok"] = result.nehari_identity_ok;
    std::cout << j.dump(2) << "\n";
    return exit_ok;
}

int run_selftest_cmd(const std::string& config_path, int resolution) {
    nf::SelftestOptions options;
    options.resolution = resolution;
    std::uint64_t seed = 0;
    if (!config_path.empty()) {
        const nf::ConfigFile cfg = nf::ConfigFile::parse_file(config_path);
        seed = cfg.get_u64("solver", "seed", 0);
        const auto st = cfg.sections().find("selftest");
        if (st != cfg.sections().end())
            for (const auto& kv : st->second)
                options.tolerance_overrides[kv.first] = cfg.get_double("selftest", kv.first);
    }
    options.seed = effective_seed(seed);
    return nf::run_selftest(options, std::cout) ? exit_ok : exit_solver_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"computes positive steady states of weakly coupled competitive elliptic systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    double t_target = 1.0;

    CLI::App* solve = app.add_subcommand("solve", "solve the coupled system by continuation");
    solve->add_option("config", config_path, "configuration file")->required();
    solve->add_option("--t", t_target, "homotopy parameter target in [0, 1]");
    solve->add_option("--output-dir", out_dir, "directory for reports and fields");

    int ell = 2;
    double p = 3.0;
    std::vector<double> a_flag, b_flag, d_flag, alpha_flag, beta_flag;
    CLI::App* scaling = app.add_subcommand("scaling-solve", "solve the finite-dimensional scaling map");
    scaling->add_option("--ell", ell, "number of components");
    scaling->add_option("--p", p, "superlinear exponent");
    scaling->add_option("--a", a_flag, "a coefficients (comma list)")->required()->delimiter(',');
    scaling->add_option("--b", b_flag, "b coefficients (comma list)")->required()->delimiter(',');
    scaling->add_option("--d", d_flag, "interaction weights, row-major")->delimiter(',');
    scaling->add_option("--alpha", alpha_flag, "alpha exponents, row-major")->delimiter(',');
    scaling->add_option("--beta", beta_flag, "beta exponents, row-major")->delimiter(',');

    CLI::App* sync_check = app.add_subcommand("sync-check", "evaluate the synchronized-existence criterion");
    sync_check->add_option("config", config_path, "configuration file")->required();

    CLI::App* sync_solve = app.add_subcommand("sync-solve", "construct a synchronized solution");
    sync_solve->add_option("config", config_path, "configuration file")->required();
    sync_solve->add_option("--output-dir", out_dir, "directory for reports and fields");

    CLI::App* sweep = app.add_subcommand("sweep-lambda", "re-solve under scaled couplings");
    sweep->add_option("config", config_path, "configuration file")->required();
    sweep->add_option("--output-dir", out_dir, "directory for the sweep table");

    CLI::App* unbounded = app.add_subcommand("unbounded", "shared-profile growth experiment");
    unbounded->add_option("config", config_path, "configuration file")->required();
    unbounded->add_option("--output-dir", out_dir, "directory for the table");

    int resolution = 32;
    std::string selftest_config;
    CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suite");
    selftest->add_option("--config", selftest_config, "optional tolerance-override config");
    selftest->add_option("--resolution", resolution, "grid nodes per direction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (solve->parsed()) return run_solve(config_path, t_target, out_dir);
        if (scaling->parsed())
            return run_scaling_solve(ell, p, a_flag, b_flag, d_flag, alpha_flag, beta_flag);
        if (sync_check->parsed()) return run_sync_check(config_path);
        if (sync_solve->parsed()) return run_sync_solve(config_path, out_dir);
        if (sweep->parsed()) return run_sweep(config_path, out_dir);
        if (unbounded->parsed()) return run_unbounded(config_path, out_dir);
        if (selftest->parsed()) return run_selftest_cmd(selftest_config, resolution);
    } catch (const nf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const nf::InvalidParamsError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const nf::Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return exit_solver_failure;
    }
    return exit_config_error;
}
