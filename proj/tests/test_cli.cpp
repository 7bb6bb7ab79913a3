#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"

using namespace michell;
using namespace michell::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kInstances = MICHELL_INSTANCE_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "cfg");
}

std::string parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int run_args(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o, e;
    const int code = run(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

}  // namespace

TEST_CASE("config defaults") {
    const RunConfig c = parse("# nothing but a comment\n");
    CHECK(c.seed == 1);
    CHECK(c.threads == 1);
    CHECK(c.cells == std::vector<int>{64, 64});
    CHECK(c.lambdas == std::vector<double>{1e2, 1e3, 1e4});
    CHECK_FALSE(c.lambdas_given);
    CHECK(c.grid().dim() == 2);
    std::ostringstream echo;
    c.echo(echo);
    CHECK(echo.str().find("values = 100, 1000, 10000") != std::string::npos);
    CHECK(echo.str().find("tolerance = 1e-06") != std::string::npos);
}

TEST_CASE("config sections") {
    const RunConfig c = parse(
        "[run]\nexperiment = recovery\nseed = 42  # trailing comment\n"
        "[grid]\ncells = 8 8 8\nlo = 0,0,0\nhi = 1, 2, 3\n"
        "[lambda]\nvalues = 1e2, 1e3\n"
        "[solver]\nmax_iterations = 10\ntolerance = 1e-8\n"
        "[tolerance]\nfinal = 0.1\n");
    CHECK(c.experiment == "recovery");
    CHECK(c.seed == 42);
    CHECK(c.grid().dim() == 3);
    CHECK(c.grid().hi(2) == 3.0);
    CHECK(c.lambdas == std::vector<double>{100, 1000});
    CHECK(c.lambdas_given);
    CHECK(c.solver.max_iterations == 10);
    CHECK(c.solver.tolerance == 1e-8);
    CHECK(c.final_tolerance == 0.1);
}

TEST_CASE("config errors carry line numbers") {
    CHECK(parse_error("[lambda]\nvalues = 100,10\n") == "cfg:2: lambda list not ascending");
    CHECK(parse_error("[run]\n\nfoo = 1\n") == "cfg:3: unknown key 'foo' in [run]");
    CHECK(parse_error("[solver]\ntolerance = abc\n") == "cfg:2: malformed number 'abc'");
    CHECK(parse_error("[solver]\nmax_iterations = 1.5\n") == "cfg:2: malformed integer '1.5'");
    CHECK(parse_error("[run]\nseed =\n") == "cfg:2: missing value for 'seed'");
    CHECK(parse_error("seed = 1\n") == "cfg:1: key 'seed' outside a section");
    CHECK(parse_error("[nope]\n") == "cfg:1: unknown section 'nope'");
    CHECK(parse_error("[run]\nexperiment = dance\n").find("unknown experiment 'dance'") != std::string::npos);
    CHECK(parse_error("[grid]\ncells = 4\n").find("2 or 3 entries") != std::string::npos);
    CHECK(parse_error("[instance]\ntruss = /no/such/file.txt\n").find("file not found") != std::string::npos);
}

TEST_CASE("config paths resolve against the file") {
    TempDir dir("michell_test_cli_cfg");
    {
        std::ofstream f(dir / "run.cfg");
        f << "[instance]\ntruss = roof.txt\n[run]\noutput = out\n";
    }
    fs::copy_file(kInstances / "roof.txt", dir / "roof.txt");
    const RunConfig c = parse_config(dir / "run.cfg");
    CHECK(c.truss_path == dir / "roof.txt");
    CHECK(c.output == dir / "out");
    CHECK_THROWS_AS(parse_config(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("usage errors exit 64 with help") {
    std::string out, err;
    CHECK(run_args({}, &out, &err) == kExitUsage);
    CHECK(err.find("Subcommands:") != std::string::npos);
    CHECK(run_args({"frobnicate"}, &out, &err) == kExitUsage);
    CHECK(run_args({"truss-lp", "--seed", "x"}, &out, &err) == kExitUsage);
    CHECK(run_args({"recovery", "--cells", "8,8"}, &out, &err) == kExitUsage);
    CHECK(err.find("needs a truss instance") != std::string::npos);
    CHECK(run_args({"--help"}, &out, &err) == kExitPass);
    CHECK(out.find("check-integrands") != std::string::npos);
}

TEST_CASE("truss-lp prints the weight") {
    TempDir dir("michell_test_cli_lp");
    std::string out;
    CHECK(run_args({"truss-lp", (kInstances / "roof.txt").string(), "-o", dir / "roof"}, &out) == kExitPass);
    CHECK(out.find("weight 2.000000\n") == 0);
    CHECK(fs::exists(dir / "roof/report.csv"));
    CHECK(fs::exists(dir / "roof/truss.svg"));
    CHECK(slurp(dir / "roof/run-manifest.txt").find("experiment = truss-lp") != std::string::npos);

    CHECK(run_args({"truss-lp", (kInstances / "single_bar.txt").string(), "-o", dir / "bar"}, &out) == kExitPass);
    CHECK(out.find("weight 1.000000\n") == 0);
}

TEST_CASE("runtime errors exit 1") {
    TempDir dir("michell_test_cli_err");
    {
        std::ofstream f(dir / "bad.cfg");
        f << "[lambda]\nvalues = 100, 10\n";
        std::ofstream t(dir / "broken.txt");
        t << "nodes\n0 0 0\n5 1 1\n";
    }
    std::string out, err;
    CHECK(run_args({"recovery", "-c", dir / "bad.cfg"}, &out, &err) == kExitError);
    CHECK(err.find("bad.cfg:2: lambda list not ascending") != std::string::npos);
    CHECK(run_args({"truss-lp", dir / "broken.txt", "-o", dir / "o"}, &out, &err) == kExitError);
    CHECK(err.find("line 3") != std::string::npos);
}

TEST_CASE("tolerance failures exit 2") {
    TempDir dir("michell_test_cli_tol");
    {
        // no sweep reaches the target to round-off
        std::ofstream f(dir / "tight.cfg");
        f << "[run]\nexperiment = gamma-sweep\n[instance]\ntruss = " << (kInstances / "uniaxial.txt").string()
          << "\nload = " << (kInstances / "uniaxial.load").string()
          << "\n[grid]\ncells = 16, 16\n[tolerance]\nlimit = 1e-300\n";
    }
    std::string out;
    CHECK(run_args({"gamma-sweep", "-c", dir / "tight.cfg", "-o", dir / "o"}, &out) == kExitToleranceFail);
    CHECK(out.find("FAIL gamma_sweep.limit_rel_error") != std::string::npos);
    CHECK(run_args({"solve-limit", "-c", dir / "tight.cfg", "-o", dir / "o"}, &out) == kExitError);
}

TEST_CASE("experiments write reports and are reproducible") {
    TempDir dir("michell_test_cli_runs");
    const std::vector<std::string> ci = {"check-integrands", "--samples", "500", "--seed", "7"};
    auto with_out = [](std::vector<std::string> a, const std::string& o) {
        a.push_back("-o");
        a.push_back(o);
        return a;
    };
    CHECK(run_args(with_out(ci, dir / "a")) == kExitPass);
    CHECK(run_args(with_out(ci, dir / "b")) == kExitPass);
    CHECK(slurp(dir / "a/report.csv") == slurp(dir / "b/report.csv"));
    CHECK(slurp(dir / "a/convergence.csv") == slurp(dir / "b/convergence.csv"));
    CHECK(slurp(dir / "a/run-manifest.txt").find("seed = 7") != std::string::npos);
    CHECK(fs::exists(dir / "a/gap.svg"));
    CHECK(fs::exists(dir / "a/timings.txt"));

    const std::string bar = (kInstances / "single_bar.txt").string();
    CHECK(run_args({"recovery", "--truss", bar, "--cells", "64,64", "--lo", "0,-1", "--hi", "1,1", "-o",
                    dir / "rec"}) == kExitPass);
    CHECK(slurp(dir / "rec/report.csv").rfind("lambda,epsilon,energy", 0) == 0);

    CHECK(run_args({"gamma-sweep", "--truss", (kInstances / "uniaxial.txt").string(), "--load",
                    (kInstances / "uniaxial.load").string(), "--cells", "16,16", "-o", dir / "gam"}) == kExitPass);
    CHECK(run_args({"solve-lambda", "--load", (kInstances / "uniaxial.load").string(), "--cells", "16,16",
                    "--lambdas", "10,100", "-o", dir / "lam"}) == kExitPass);
    CHECK(fs::exists(dir / "lam/gap.svg"));
}
