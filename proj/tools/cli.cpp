#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "michell/energy.hpp"
#include "michell/errors.hpp"
#include "michell/field_io.hpp"
#include "michell/lab.hpp"
#include "michell/loads.hpp"
#include "michell/solvers.hpp"
#include "michell/truss.hpp"

namespace michell::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Input missing for the chosen subcommand.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raw command-line values; each overrides the config file when given.
struct Flags {
    std::string config, out, truss, load, cells, lo, hi, lambdas;
    std::uint64_t seed = 0;
    int threads = 1, max_iterations = 0;
    double epsilon = 0.0;
    std::size_t samples = 0;
    const CLI::App* sub = nullptr;

    bool given(const std::string& name) const {
        try {
            return sub->get_option(name)->count() > 0;
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
    }
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("-c,--config", f.config, "sectioned key = value run file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", f.out, "output directory (default michell-out)");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--threads", f.threads, "worker threads (default 1)")->check(CLI::PositiveNumber);
}

void add_grid(CLI::App* sub, Flags& f) {
    sub->add_option("--truss", f.truss, "ground-structure instance file")->check(CLI::ExistingFile);
    sub->add_option("--load", f.load, "load description file")->check(CLI::ExistingFile);
    sub->add_option("--cells", f.cells, "cells per axis, e.g. 64,64");
    sub->add_option("--lo", f.lo, "lower box corner, e.g. 0,0");
    sub->add_option("--hi", f.hi, "upper box corner, e.g. 1,1");
    sub->add_option("--epsilon", f.epsilon, "point-force width (default 4 cells)");
    sub->add_option("--max-iterations", f.max_iterations, "solver iteration cap");
}

void add_lambdas(CLI::App* sub, Flags& f) {
    sub->add_option("--lambdas", f.lambdas, "ascending lambda list, e.g. 100,1000,10000");
}

std::vector<double> list_or_throw(const std::string& s, const char* what) {
    try {
        return parse_number_list(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(what) + ": " + e.what());
    }
}

RunConfig build_config(const std::string& experiment, const Flags& f) {
    RunConfig cfg;
    if (!f.config.empty()) {
        cfg = parse_config(f.config);
        if (!cfg.experiment.empty() && cfg.experiment != experiment)
            throw ConfigError(f.config + ": experiment '" + cfg.experiment + "' does not match '" + experiment + "'");
    }
    cfg.experiment = experiment;
    if (!f.out.empty()) cfg.output = f.out;
    if (f.given("--seed")) cfg.seed = f.seed;
    if (f.given("--threads")) cfg.threads = f.threads;
    if (!f.truss.empty()) cfg.truss_path = f.truss;
    if (!f.load.empty()) cfg.load_path = f.load;
    if (f.given("--epsilon")) cfg.epsilon = f.epsilon;
    if (f.given("--max-iterations")) cfg.solver.max_iterations = f.max_iterations;
    if (f.given("--samples")) cfg.samples = f.samples;
    if (!f.cells.empty()) {
        cfg.cells.clear();
        for (double x : list_or_throw(f.cells, "--cells")) cfg.cells.push_back(static_cast<int>(x));
    }
    if (!f.lo.empty()) cfg.lo = list_or_throw(f.lo, "--lo");
    if (!f.hi.empty()) cfg.hi = list_or_throw(f.hi, "--hi");
    // a bare --cells on a 3D grid keeps the unit box
    if (cfg.cells.size() == 3 && f.lo.empty() && cfg.lo.size() == 2) cfg.lo = {0, 0, 0};
    if (cfg.cells.size() == 3 && f.hi.empty() && cfg.hi.size() == 2) cfg.hi = {1, 1, 1};
    if (!f.lambdas.empty()) {
        cfg.lambdas = list_or_throw(f.lambdas, "--lambdas");
        cfg.lambdas_given = true;
    }
    cfg.solver.seed = cfg.seed;
    validate(cfg);
    return cfg;
}

// ---------------------------------------------------------------------------
// Output helpers

struct Run {
    const RunConfig& cfg;
    std::ostream& out;
    std::vector<const ExperimentReport*> reports;
    std::vector<std::pair<std::string, double>> timings;

    fs::path dir() const { return fs::path(cfg.output); }
    std::string file(const std::string& name) const {
        fs::create_directories(dir());
        return (dir() / name).string();
    }

    void finish(const std::string& command) {
        {
            std::ofstream m(file("run-manifest.txt"), std::ios::binary);
            m << "version = " << kVersion << "\ncommand = " << command << "\n\n";
            cfg.echo(m);
            for (const auto* r : reports) {
                m << "\n";
                r->write_summary(m);
            }
        }
        std::ofstream t(file("timings.txt"), std::ios::binary);
        for (const auto& [name, s] : timings) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f", s);
            t << name << " = " << buf << " s\n";
        }
    }

    int verdict() const {
        bool ok = true;
        for (const auto* r : reports)
            for (const auto& c : r->checks()) {
                out << (c.passed ? "pass " : "FAIL ") << r->name() << "." << c.name << " = " << format_number(c.value)
                    << (c.relation == Check::Relation::AtMost ? " <= " : " >= ") << format_number(c.tolerance)
                    << "\n";
                ok = ok && c.passed;
            }
        out << "outputs in " << cfg.output << "\n";
        return ok ? kExitPass : kExitToleranceFail;
    }
};

double max_spacing(const Grid& g) {
    double h = 0.0;
    for (int a = 0; a < g.dim(); ++a) h = std::max(h, g.spacing(a));
    return h;
}

double point_width(const RunConfig& cfg, const Grid& g) { return cfg.epsilon > 0.0 ? cfg.epsilon : 4.0 * max_spacing(g); }

std::vector<double> cell_norms(const StressField& f) {
    const Grid& g = f.grid();
    std::vector<double> v(g.num_cells());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = g.dim() == 2 ? f.cell_tensor<2>(i).norm() : f.cell_tensor<3>(i).norm();
    return v;
}

TrussInstance require_truss(const RunConfig& cfg) {
    if (cfg.truss_path.empty()) throw UsageError(cfg.experiment + " needs a truss instance ([instance] truss or --truss)");
    return read_truss_file(cfg.truss_path);
}

/// Grid load from the load file, else from the truss LP design.
VectorField require_load(const RunConfig& cfg, const Grid& grid, double* target) {
    if (!cfg.load_path.empty()) {
        const LoadSpec spec = read_load_spec_file(cfg.load_path);
        if (spec.dim != grid.dim()) throw InvalidInput("load file dimension does not match the grid");
        return assemble_load(spec, grid, point_width(cfg, grid));
    }
    if (!cfg.truss_path.empty()) {
        const TrussInstance inst = read_truss_file(cfg.truss_path);
        if (grid.dim() != 2) throw InvalidInput("truss loads need a planar grid");
        const TrussSolution lp = solve_truss_lp(inst.structure, inst.loads);
        if (target) *target = 2.0 * lp.report.objective;
        return assemble_load(truss_load_spec(inst.structure, lp.design, inst.loads), grid, point_width(cfg, grid));
    }
    throw UsageError(cfg.experiment + " needs a load ([instance] load/truss or --load/--truss)");
}

Series column_series(const ExperimentReport& r, const std::string& label, const std::string& x, const std::string& y) {
    return {label, r.column(x), r.column(y)};
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_check_integrands(const RunConfig& cfg, Run& run) {
    const std::vector<double> lambdas = cfg.lambdas_given ? cfg.lambdas : std::vector<double>{1.0, 1e2, 1e4};
    auto t0 = Clock::now();
    const ExperimentReport sampler = run_inequality_sampler(cfg.samples, lambdas, cfg.seed);
    run.timings.emplace_back("sampler", seconds_since(t0));
    sampler.write_csv(run.file("report.csv"));

    t0 = Clock::now();
    const std::vector<double> sweep{1e2, 1e3, 1e4, 1e5, 1e6};
    const std::size_t n2 = std::min<std::size_t>(cfg.samples, 10000), n3 = std::min<std::size_t>(cfg.samples, 100);
    // norms up to 10^0.8 keep every 2D sample on the low branch at λ ≥ 10²
    const ExperimentReport conv = run_pointwise_convergence(sample_tensors<2>(n2, cfg.seed + 1, -3.0, 0.8),
                                                            sample_tensors<3>(n3, cfg.seed + 2, -3.0, 0.9), sweep);
    run.timings.emplace_back("pointwise_convergence", seconds_since(t0));
    conv.write_csv(run.file("convergence.csv"));

    const ExperimentReport ref =
        run_pointwise_convergence({SymTensor2::identity()}, {SymTensor3::identity()}, sweep);
    std::vector<double> g2, g3, pred;
    for (std::size_t i = 0; i < ref.rows().size(); ++i) {
        const auto& row = ref.rows()[i];
        (row[0] == 2.0 ? g2 : g3).push_back(row[5]);
        if (row[0] == 2.0) pred.push_back(row[6]);
    }
    write_loglog_svg(run.file("gap.svg"), "h_limit - h_lambda at the identity", "lambda", "gap",
                     {{"2D", sweep, g2}, {"2D predicted", sweep, pred}, {"3D", sweep, g3}});
    run.reports = {&sampler, &conv};
    run.finish("check-integrands");
    return run.verdict();
}

int cmd_truss_lp(const RunConfig& cfg, Run& run) {
    const TrussInstance inst = require_truss(cfg);
    const auto t0 = Clock::now();
    const TrussSolution s = solve_truss_lp(inst.structure, inst.loads, cfg.solver);
    run.timings.emplace_back("lp", seconds_since(t0));
    const GroundStructure& gs = inst.structure;

    ExperimentReport rep("truss_lp", {"bar", "i", "j", "length", "w"}, cfg.seed);
    for (std::size_t k = 0; k < gs.bars().size(); ++k) {
        const Bar& b = gs.bars()[k];
        rep.add_row({double(k), double(b.i), double(b.j), b.length, s.design.w[k]});
    }
    const double residual = truss_residual(gs, s.design, inst.loads);
    rep.set_parameter("weight", format_number(s.report.objective));
    rep.set_parameter("dual_objective", format_number(s.dual_objective));
    rep.set_parameter("iterations", std::to_string(s.report.iterations));
    rep.add_check("certificate_gap", std::abs(s.report.objective - s.dual_objective), 1e-6);
    rep.add_check("dual_infeasibility", s.dual_infeasibility, 1e-8);
    rep.add_check("residual", residual, 1e-8);
    rep.write_csv(run.file("report.csv"));
    {
        std::ofstream d(run.file("design.txt"), std::ios::binary);
        write_truss_design(d, gs, s.design);
    }
    write_truss_svg(run.file("truss.svg"), gs, s.design);

    char buf[64];
    std::snprintf(buf, sizeof buf, "weight %.6f\n", s.report.objective);
    run.out << buf;
    run.reports = {&rep};
    run.finish("truss-lp");
    return run.verdict();
}

int cmd_solve_limit(const RunConfig& cfg, Run& run) {
    const Grid grid = cfg.grid();
    const auto t0 = Clock::now();
    FieldSolution sol{StressField(grid), {}};
    ExperimentReport rep("solve_limit", {"objective", "residual", "iters", "converged"}, cfg.seed);
    if (cfg.load_path.empty() && !cfg.truss_path.empty()) {
        // a truss instance is solved next to its rasterized LP design
        rep = run_cross_validation(require_truss(cfg), grid, point_width(cfg, grid) / max_spacing(grid), cfg.solver,
                                   &sol);
    } else {
        const VectorField load = require_load(cfg, grid, nullptr);
        sol = solve_limit_field(grid, load, cfg.solver);
        rep.add_row({sol.report.objective, sol.report.residual, double(sol.report.iterations),
                     sol.report.converged ? 1.0 : 0.0});
        rep.add_check("residual", sol.report.residual, cfg.solver.tolerance);
    }
    run.timings.emplace_back("solve", seconds_since(t0));
    rep.write_csv(run.file("report.csv"));
    write_field_binary(run.file("field.bin"), sol.field);
    write_heatmap_svg(run.file("field.svg"), "|sigma| per cell", grid, cell_norms(sol.field));
    char buf[64];
    std::snprintf(buf, sizeof buf, "limit value %.6f\n", sol.report.objective);
    run.out << buf;
    run.reports = {&rep};
    run.finish("solve-limit");
    return run.verdict();
}

int cmd_solve_lambda(const RunConfig& cfg, Run& run) {
    const Grid grid = cfg.grid();
    double target = NAN;
    const VectorField load = require_load(cfg, grid, &target);
    auto t0 = Clock::now();
    if (!std::isfinite(target)) {
        // no truss: measure against the limit problem itself
        target = solve_limit_field(grid, load, cfg.solver).report.objective;
        run.timings.emplace_back("limit", seconds_since(t0));
    }
    std::vector<double> secs;
    ExperimentReport rep = lambda_sweep({grid, load, target}, cfg.lambdas, cfg.solver, &secs);
    for (std::size_t i = 0; i < secs.size(); ++i)
        run.timings.emplace_back("lambda " + format_number(cfg.lambdas[i]), secs[i]);

    // The finite-λ minima approach the discrete limit value, which differs
    // from 2W by the discretization error; monotonicity is checked against it.
    double limit_value = NAN;
    for (const auto& [k, v] : rep.parameters())
        if (k == "limit_value") limit_value = std::stod(v);
    const auto energy = rep.column("energy"), gap = rep.column("gap"), res = rep.column("residual");
    double failed = 0, step = -INFINITY, worst_res = 0.0;
    for (std::size_t i = 0; i < gap.size(); ++i) {
        if (!std::isfinite(energy[i])) ++failed;
        worst_res = std::max(worst_res, std::isfinite(res[i]) ? res[i] : INFINITY);
        if (i > 0)
            step = std::max(step, (std::abs(energy[i] - limit_value) - std::abs(energy[i - 1] - limit_value)) /
                                      std::max(std::abs(limit_value), 1e-300));
    }
    rep.add_check("failed_rows", failed, 0.0);
    rep.add_check("max_residual", worst_res, cfg.solver.tolerance);
    if (gap.size() > 1) rep.add_check("limit_distance_max_step", std::isfinite(step) ? step : NAN, 1e-6);
    if (target > 0.0) rep.add_check("final_rel_error", gap.back() / target, cfg.final_tolerance);
    rep.write_csv(run.file("report.csv"));
    write_loglog_svg(run.file("gap.svg"), "finite-lambda gap", "lambda", "value",
                     {column_series(rep, "|E - target|", "lambda", "gap"),
                      column_series(rep, "lambda^-1/4 |g|_-1", "lambda", "hminus1")});
    run.reports = {&rep};
    run.finish("solve-lambda");
    return run.verdict();
}

int cmd_recovery(const RunConfig& cfg, Run& run) {
    const TrussInstance inst = require_truss(cfg);
    const auto t0 = Clock::now();
    const ExperimentReport rep = run_recovery_experiment(inst, cfg.grid(), cfg.lambdas);
    run.timings.emplace_back("recovery", seconds_since(t0));
    rep.write_csv(run.file("report.csv"));
    write_loglog_svg(run.file("gap.svg"), "recovery sequence", "lambda", "value",
                     {column_series(rep, "|E - 2W|", "lambda", "gap"), column_series(rep, "epsilon", "lambda", "epsilon"),
                      column_series(rep, "lambda^-1/4 |g|_-1", "lambda", "hminus1")});
    const TrussSolution lp = solve_truss_lp(inst.structure, inst.loads);
    write_truss_svg(run.file("truss.svg"), inst.structure, lp.design);
    run.reports = {&rep};
    run.finish("recovery");
    return run.verdict();
}

int cmd_gamma_sweep(const RunConfig& cfg, Run& run) {
    const Grid grid = cfg.grid();
    GammaInstance gi{require_truss(cfg), std::nullopt};
    if (!cfg.load_path.empty()) gi.continuum = read_load_spec_file(cfg.load_path);
    gi.point_cells = point_width(cfg, grid) / max_spacing(grid);
    gi.limit_tolerance = cfg.limit_tolerance;
    gi.final_tolerance = cfg.final_tolerance;
    std::vector<double> secs;
    const ExperimentReport rep = run_gamma_sweep(gi, grid, cfg.lambdas, cfg.solver, &secs);
    for (std::size_t i = 0; i < secs.size(); ++i)
        run.timings.emplace_back(i == 0 ? "limit" : "lambda " + format_number(cfg.lambdas[i - 1]), secs[i]);
    rep.write_csv(run.file("report.csv"));
    write_loglog_svg(run.file("gap.svg"), "gamma sweep", "lambda", "gap",
                     {column_series(rep, "|E_lambda - 2W|", "lambda", "gap"),
                      column_series(rep, "|limit - 2W|", "lambda", "limit_gap")});
    const TrussSolution lp = solve_truss_lp(gi.truss.structure, gi.truss.loads);
    write_truss_svg(run.file("truss.svg"), gi.truss.structure, lp.design);
    run.reports = {&rep};
    run.finish("gamma-sweep");
    return run.verdict();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Michell-type optimal design: integrands, truss LP, field solvers and experiments", "michell"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.footer(
        "Exit codes: 0 all checks pass, 2 a tolerance check failed, 1 error, 64 usage.\n"
        "Outputs (in --out): report.csv, *.svg, run-manifest.txt, timings.txt.");

    Flags f;
    std::string truss_positional;
    auto* ci = app.add_subcommand("check-integrands", "sample the density inequalities and pointwise gaps");
    add_common(ci, f);
    add_lambdas(ci, f);
    ci->add_option("--samples", f.samples, "tensors per dimension (default 100000)")
                        ->check(CLI::PositiveNumber);

    auto* lp = app.add_subcommand("truss-lp", "minimum-weight truss on a ground structure");
    add_common(lp, f);
    lp->add_option("instance", truss_positional, "ground-structure instance file")->check(CLI::ExistingFile);

    auto* sl = app.add_subcommand("solve-limit", "continuum limit problem on a grid");
    auto* sf = app.add_subcommand("solve-lambda", "finite-lambda sweep warm-started from the limit solve");
    auto* rc = app.add_subcommand("recovery", "mollified truss recovery sequence");
    auto* gs = app.add_subcommand("gamma-sweep", "truss LP against limit and finite-lambda solves");
    for (auto* sub : {sl, sf, rc, gs}) {
        add_common(sub, f);
        add_grid(sub, f);
        if (sub != sl) add_lambdas(sub, f);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        if (!args.empty()) err << "error: " << e.what() << "\n";
        err << app.help();
        return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    f.sub = sub;
    if (!truss_positional.empty()) f.truss = truss_positional;
    try {
        const RunConfig cfg = build_config(name, f);
        Run run{cfg, out, {}, {}};
        if (name == "check-integrands") return cmd_check_integrands(cfg, run);
        if (name == "truss-lp") return cmd_truss_lp(cfg, run);
        if (name == "solve-limit") return cmd_solve_limit(cfg, run);
        if (name == "solve-lambda") return cmd_solve_lambda(cfg, run);
        if (name == "recovery") return cmd_recovery(cfg, run);
        return cmd_gamma_sweep(cfg, run);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace michell::cli
