// Acceptance suite: one PASS/FAIL line per criterion, exit 0 when all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "michell/integrands.hpp"
#include "michell/lab.hpp"
#include "michell/solvers.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace michell;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

std::string checks_line(const ExperimentReport& r) {
    std::string s;
    for (const auto& c : r.checks())
        s += (s.empty() ? "" : ", ") + c.name + "=" + fmt("%.3g", c.value) + (c.passed ? "" : "(!)");
    return s;
}

std::string csv(const ExperimentReport& r) {
    std::ostringstream o;
    r.write_csv(o);
    return o.str();
}

TrussInstance single_bar() { return {GroundStructure({{0, 0}, {1, 0}}, {{0, 1}}), {{0, {-1, 0}}, {1, {1, 0}}}}; }

TrussInstance roof() {
    return {GroundStructure({{0, 0}, {1, 1}, {2, 0}}, {{0, 1}, {1, 2}}, {0, 2}), {{1, {0, -1}}}};
}

GammaInstance uniaxial() {
    std::vector<Point2> nodes;
    const int k = 3;
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) nodes.push_back({i / (k - 1.0), j / (k - 1.0)});
    PointLoadSet loads;
    for (int j = 0; j < k; ++j) {
        const double share = (j == 0 || j == k - 1) ? 0.5 / (k - 1) : 1.0 / (k - 1);
        loads.push_back({j * k, {-share, 0}});
        loads.push_back({j * k + k - 1, {share, 0}});
    }
    LoadSpec spec;
    spec.dim = 2;
    spec.tractions.push_back({0, false, {0, 0, 0}, {0, 1, 0}, {-1, 0, 0}});
    spec.tractions.push_back({0, true, {0, 0, 0}, {0, 1, 0}, {1, 0, 0}});
    return {{GroundStructure::complete(nodes), loads}, spec};
}

const Grid kRecoveryGrid(2, {256, 256, 1}, {0, -1, 0}, {1, 1, 1});
const Grid kRoofGrid(2, {256, 256, 1}, {-0.25, -0.75, 0}, {2.25, 1.75, 1});

// ---------------------------------------------------------------------------

Outcome integrand_suite() {
    const auto t0 = Clock::now();
    const ExperimentReport r = run_inequality_sampler(100000, {1.0, 1e2, 1e4}, 7);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    double boundary = 0;
    for (double b : r.column("boundary_samples")) boundary = std::max(boundary, b);
    return {r.passed() && secs < 10.0 && boundary >= 1000,
            checks_line(r) + fmt(", boundary samples/row=%g, %.2fs", boundary, secs)};
}

Outcome exact_gap() {
    const ExperimentReport r = run_pointwise_convergence(
        sample_tensors<2>(10000, 11, -3.0, 0.8),
        {SymTensor3::identity(), SymTensor3::diagonal({0.3, 0.4, 0.5}), SymTensor3::diagonal({1.0, -2.0, 3.0})},
        {1e2, 1e3, 1e4, 1e5, 1e6});
    double low_rows = 0;
    for (const auto& [k, v] : r.parameters())
        if (k == "low_branch_rows") low_rows = std::stod(v);
    // every 2D sample must sit on the low branch at the smallest λ
    return {r.passed() && low_rows >= 5 * 10000, checks_line(r) + fmt(", low-branch rows=%g", low_rows)};
}

template <int N>
double prox_worst_excess(int samples, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = -INFINITY;
    for (int i = 0; i < samples; ++i) {
        const double lam = std::pow(10.0, -1.0 + 5.0 * u(rng));
        const double s = std::sqrt(lam);
        auto t = testing::random_tensor<N>(rng, 0.0, 0.0);
        t *= s * std::pow(10.0, -1.0 + 2.0 * u(rng));
        const double step = s * std::pow(10.0, -2.0 + 3.0 * u(rng));
        const auto a = eigen_sym(t).values;
        // the prox shares eigenvectors with τ, so the spectrum is a complete search space
        auto obj = [&](const std::array<double, N>& v) {
            double q = 0.0;
            std::array<double, N> x{};
            for (int k = 0; k < N; ++k) {
                q += 0.5 * (v[k] - a[k]) * (v[k] - a[k]);
                x[k] = std::abs(v[k]);
            }
            std::sort(x.begin(), x.end());
            return q + step * h_lambda_abs(x, s);
        };
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        const double fo = testing::grid_minimize<N>(obj, 1.05 * m + 1e-12, N == 2 ? 81 : 31).second;
        const auto y = prox_h_lambda(t, step, Lambda(lam));
        const double fy = 0.5 * (y - t).norm2() + step * h_lambda(y, Lambda(lam));
        worst = std::max(worst, fy - fo);
    }
    return worst;
}

Outcome prox_oracles() {
    const double w2 = prox_worst_excess<2>(1000, 101), w3 = prox_worst_excess<3>(1000, 103);
    return {w2 <= 1e-6 && w3 <= 1e-6, fmt("max excess over brute force: 2D %.2e, 3D %.2e", w2, w3)};
}

Outcome adjointness() {
    const ExperimentReport r = run_adjointness({Grid::square(16), Grid::square(64), Grid::cube(16)}, 100, 5);
    return {r.passed(), checks_line(r)};
}

Outcome truss_lp() {
    bool ok = true;
    std::string detail;
    for (const auto& [name, inst, expected] :
         {std::tuple{"single bar", single_bar(), 1.0}, std::tuple{"roof", roof(), 2.0}}) {
        const TrussSolution s = solve_truss_lp(inst.structure, inst.loads);
        const double w = s.report.objective;
        const double cert = std::abs(w - s.dual_objective);
        const double res = truss_residual(inst.structure, s.design, inst.loads);
        ok = ok && std::abs(w - expected) <= 1e-8 && cert <= 1e-6 && res <= 1e-8 && s.dual_infeasibility <= 1e-8;
        detail += std::string(detail.empty() ? "" : "; ") + name +
                  fmt(" weight=%.12g certificate gap=%.1e residual=%.1e", w, cert, res);
    }
    return {ok, detail};
}

Outcome recovery() {
    const auto t0 = Clock::now();
    const ExperimentReport r = run_recovery_experiment(single_bar(), kRecoveryGrid, {1e2, 1e3, 1e4});
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const auto gap = r.column("gap");
    return {r.passed() && secs < 60.0,
            checks_line(r) + fmt(", gaps %.4f %.4f %.4f, %.1fs", gap[0], gap[1], gap[2], secs)};
}

Outcome gamma_sweep() {
    const auto t0 = Clock::now();
    const ExperimentReport r = run_gamma_sweep(uniaxial(), Grid::square(64), {1e2, 1e3, 1e4}, {});
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return {r.passed() && secs < 300.0,
            checks_line(r) + fmt(", limit=%.6f, E(1e4)=%.6f, %.1fs", r.column("limit_value")[0],
                                 r.column("energy").back(), secs)};
}

Outcome cross_validation() {
    SolveOptions opts;
    opts.max_iterations = 200;
    const auto t0 = Clock::now();
    const ExperimentReport r = run_cross_validation(roof(), kRoofGrid, 4.0, opts);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const auto& row = r.rows().front();
    return {r.passed(), checks_line(r) + fmt(", competitor=%.4f limit=%.4f, %.1fs", row[2], row[4], secs)};
}

Outcome reproducibility() {
    bool ok = true;
    std::string detail;
    auto same = [&](const std::string& what, const std::function<std::string()>& make) {
        const std::string a = make(), b = make();
        const bool eq = a == b && !a.empty();
        ok = ok && eq;
        detail += (detail.empty() ? "" : ", ") + what + (eq ? " identical" : " DIFFER");
    };
    same("sampler", [] { return csv(run_inequality_sampler(20000, {1.0, 1e2, 1e4}, 42)); });
    same("recovery", [] {
        return csv(run_recovery_experiment(single_bar(), Grid(2, {64, 64, 1}, {0, -1, 0}, {1, 1, 1}), {1e2, 1e3, 1e4}));
    });
    same("cross-validation", [] {
        SolveOptions o;
        o.seed = 42;
        return csv(run_cross_validation(roof(), Grid(2, {48, 48, 1}, {-0.25, -0.75, 0}, {2.25, 1.75, 1}), 4, o));
    });
    // end to end through the command line
    const auto dir = std::filesystem::temp_directory_path() / "michell_acceptance";
    int run = 0;
    same("cli", [&] {
        const std::string out = (dir / std::to_string(run++)).string();
        std::ostringstream o, e;
        if (cli::run({"check-integrands", "--samples", "5000", "--seed", "42", "-o", out}, o, e) != 0) return std::string();
        std::ifstream f(out + "/report.csv", std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    });
    std::filesystem::remove_all(dir);
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"integrand inequalities, branch continuity, 3D monotonicity", integrand_suite},
        {"exact 2D gap and 3D convergence slope", exact_gap},
        {"prox against brute-force oracles", prox_oracles},
        {"discrete adjointness", adjointness},
        {"truss LP weights and certificates", truss_lp},
        {"recovery sequence on the unit bar", recovery},
        {"gamma sweep on the uniaxial instance", gamma_sweep},
        {"cross-validation on the roof truss", cross_validation},
        {"byte-identical CSVs under a fixed seed", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 2;
}
