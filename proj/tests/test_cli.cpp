#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nf/scalar_solver.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path work_dir(const std::string& name) {
    const fs::path dir = fs::path("cli_work") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CmdResult run_cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = env + std::string(CLI_BIN) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    CmdResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

std::string fixture(const std::string& name) {
    return (fs::path(FIXTURES_DIR) / name).string();
}

// Report bytes with the timestamp line removed.
std::string strip_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.find("\"timestamp\"") == std::string::npos) out << line << "\n";
    return out.str();
}

} // namespace

TEST_CASE("scaling-solve reports closed forms and degree signs") {
    const fs::path dir = work_dir("scaling");

    CmdResult dec = run_cli("scaling-solve --ell 2 --p 3 --a 1,2 --b 2,0.5", dir);
    REQUIRE(dec.exit_code == 0);
    const json jd = json::parse(dec.out);
    CHECK(std::abs(jd["s"][0].get<double>() - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(jd["s"][1].get<double>() - 2.0) < 1e-12);
    CHECK(jd["degree_sign"].get<int>() == 1);

    CmdResult sym = run_cli("scaling-solve --ell 2 --p 3 --a 1,1 --b 2,2 --d 0,1,1,0", dir);
    REQUIRE(sym.exit_code == 0);
    const json js = json::parse(sym.out);
    CHECK(std::abs(js["s"][0].get<double>() - 1.0) < 1e-12);
    CHECK(std::abs(js["s"][1].get<double>() - 1.0) < 1e-12);

    CmdResult nozero = run_cli("scaling-solve --ell 2 --p 3 --a 1,1 --b 0,1", dir);
    CHECK(nozero.exit_code == 2);
    CHECK(json::parse(nozero.out).contains("error"));
}

TEST_CASE("config validation failures name the violated constraint") {
    const fs::path dir = work_dir("badcfg");
    CmdResult bad = run_cli("solve " + fixture("badexp.cfg") + " --output-dir " + dir.string(), dir);
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("alpha_ij + beta_ij < p") != std::string::npos);

    CmdResult missing = run_cli("solve /nonexistent.cfg", dir);
    CHECK(missing.exit_code == 1);
}

TEST_CASE("solve emits a certified report, fields, and a trace") {
    const fs::path dir = work_dir("solve16");
    CmdResult res =
        run_cli("solve " + fixture("lotka16.cfg") + " --output-dir " + dir.string(), dir);
    REQUIRE(res.exit_code == 0);

    const json j = json::parse(slurp(dir / "lotka16_report.json"));
    CHECK(j["report"]["converged"].get<bool>());
    CHECK(j["report"]["relative_residual"].get<double>() <= 1e-8);
    CHECK(j["report"]["strictly_positive"].get<bool>());

    CHECK(fs::exists(dir / "lotka16_u1.csv"));
    CHECK(fs::exists(dir / "lotka16_u2.csv"));
    const std::string trace = slurp(dir / "lotka16_trace.csv");
    CHECK(trace.rfind("t,norm_u1,norm_u2,min_u1,min_u2,s_u1,s_u2,residual\n", 0) == 0);

    SUBCASE("byte-identical reruns modulo the timestamp") {
        const fs::path dir2 = work_dir("solve16_again");
        CmdResult res2 =
            run_cli("solve " + fixture("lotka16.cfg") + " --output-dir " + dir2.string(), dir2);
        REQUIRE(res2.exit_code == 0);
        CHECK(strip_timestamp(slurp(dir / "lotka16_report.json")) ==
              strip_timestamp(slurp(dir2 / "lotka16_report.json")));
        CHECK(slurp(dir / "lotka16_trace.csv") == slurp(dir2 / "lotka16_trace.csv"));
        CHECK(slurp(dir / "lotka16_u1.csv") == slurp(dir2 / "lotka16_u1.csv"));
    }
}

TEST_CASE("decoupled configs warn and reproduce the scalar solves") {
    const fs::path dir = work_dir("decoupled");
    CmdResult res =
        run_cli("solve " + fixture("decoupled16.cfg") + " --output-dir " + dir.string(), dir);
    REQUIRE(res.exit_code == 0);
    CHECK(res.err.find("decouples") != std::string::npos);

    const json j = json::parse(slurp(dir / "decoupled16_report.json"));
    const nf::Domain d = nf::Domain::box(1.0, 1.0, 16, 16);
    const double n1 = nf::h1_norm(nf::least_energy_scalar(1.0, 3.0, d));
    const double n2 = nf::h1_norm(nf::least_energy_scalar(4.0, 3.0, d));
    CHECK(nft::rel_err(j["report"]["norms_h1"][0].get<double>(), n1) < 1e-9);
    CHECK(nft::rel_err(j["report"]["norms_h1"][1].get<double>(), n2) < 1e-9);
}

TEST_CASE("sync commands") {
    const fs::path dir = work_dir("sync");

    CmdResult check = run_cli("sync-check " + fixture("sync64.cfg"), dir);
    REQUIRE(check.exit_code == 0);
    const json jv = json::parse(check.out);
    CHECK(jv["verdict"]["holds"].get<bool>());
    CHECK(std::abs(jv["verdict"]["a"].get<double>() - 1.0) < 1e-12);
    CHECK(std::abs(jv["verdict"]["rho"].get<double>() - 0.5) < 1e-12);

    CmdResult violating = run_cli(
        "sync-solve " + fixture("sync_violating32.cfg") + " --output-dir " + dir.string(), dir);
    CHECK(violating.exit_code == 2);
    const json jbad = json::parse(violating.out);
    CHECK_FALSE(jbad["verdict"]["holds"].get<bool>());
    CHECK(jbad["verdict"]["failure_reason"].get<std::string>() == "ratio mismatch");
}

TEST_CASE("single-point sweep matches solve") {
    const fs::path dir = work_dir("sweep");
    CmdResult solve =
        run_cli("solve " + fixture("sweep_single16.cfg") + " --output-dir " + dir.string(), dir);
    REQUIRE(solve.exit_code == 0);
    const json j = json::parse(slurp(dir / "sweep16_report.json"));

    CmdResult sweep = run_cli(
        "sweep-lambda " + fixture("sweep_single16.cfg") + " --output-dir " + dir.string(), dir);
    REQUIRE(sweep.exit_code == 0);

    const std::string csv = slurp(dir / "sweep16_sweep.csv");
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header.rfind("kappa,norm_u1,norm_u2,overlap_12,residual,converged", 0) == 0);
    std::replace(row.begin(), row.end(), ',', ' ');
    std::istringstream fields(row);
    double kappa, norm1, norm2;
    fields >> kappa >> norm1 >> norm2;
    CHECK(kappa == 1.0);
    CHECK(nft::rel_err(norm1, j["report"]["norms_h1"][0].get<double>()) < 1e-12);
    CHECK(nft::rel_err(norm2, j["report"]["norms_h1"][1].get<double>()) < 1e-12);
}

TEST_CASE("shipped production fixture solves end to end") {
    const fs::path dir = work_dir("lotka64");
    CmdResult res =
        run_cli("solve " + fixture("lotka64.cfg") + " --output-dir " + dir.string(), dir);
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(slurp(dir / "lotka64_report.json"));
    CHECK(j["report"]["converged"].get<bool>());
    CHECK(j["report"]["relative_residual"].get<double>() <= 1e-8);
    CHECK(j["report"]["strictly_positive"].get<bool>());
    CHECK(j["report"]["fully_nontrivial"].get<bool>());
}

TEST_CASE("partial homotopy targets are solvable") {
    const fs::path dir = work_dir("half_t");
    CmdResult res = run_cli(
        "solve " + fixture("lotka16.cfg") + " --t 0.5 --output-dir " + dir.string(), dir);
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(slurp(dir / "lotka16_report.json"));
    CHECK(j["report"]["t"].get<double>() == 0.5);
    CHECK(j["report"]["converged"].get<bool>());
}

TEST_CASE("environment seed override is recorded") {
    const fs::path dir = work_dir("envseed");
    CmdResult res = run_cli("sync-check " + fixture("sync64.cfg"), dir, "NEHARI_FORGE_SEED=7 ");
    REQUIRE(res.exit_code == 0);
    CHECK(json::parse(res.out)["seed"].get<int>() == 7);
}

TEST_CASE("a failing sweep point is flagged while the sweep continues") {
    const fs::path dir = work_dir("sweepfail");
    CmdResult res = run_cli(
        "sweep-lambda " + fixture("sweep_fail16.cfg") + " --output-dir " + dir.string(), dir);
    REQUIRE(res.exit_code == 0); // per-point failures do not fail the command
    CHECK(json::parse(res.out)["failed_points"].get<int>() >= 1);

    const std::string csv = slurp(dir / "sweepfail16_sweep.csv");
    CHECK(csv.find(",1\n") != std::string::npos); // kappa = 1 converged
    CHECK(csv.find(",0\n") != std::string::npos); // a later point flagged
}

TEST_CASE("unbounded command tabulates growing norms") {
    const fs::path dir = work_dir("unbounded");
    CmdResult res =
        run_cli("unbounded " + fixture("unbounded32.cfg") + " --output-dir " + dir.string(), dir);
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK(j["norms_strictly_increasing"].get<bool>());
    CHECK(j["nehari_identity_ok"].get<bool>());

    const std::string csv = slurp(dir / "unbounded32_unbounded.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "a,norm_w,int_wq1,int_wp1,residual");
    double prev = 0.0;
    int rows = 0;
    while (std::getline(lines, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double a, norm_w;
        fields >> a >> norm_w;
        CHECK(norm_w > prev);
        prev = norm_w;
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("selftest passes, is reproducible, and honors tolerance overrides") {
    const fs::path dir = work_dir("selftest");

    CmdResult first = run_cli("selftest --resolution 12", dir);
    CHECK(first.exit_code == 0);
    CHECK(first.out.find("invariants passed") != std::string::npos);
    CHECK(first.out.find("[FAIL]") == std::string::npos);

    CmdResult second = run_cli("selftest --resolution 12", dir);
    CHECK(second.out == first.out);

    CmdResult corrupted = run_cli(
        "selftest --resolution 12 --config " + fixture("selftest_bad_tol.cfg"), dir);
    CHECK(corrupted.exit_code != 0);
    CHECK(corrupted.out.find("[FAIL] grid.inverse_pair") != std::string::npos);
}
