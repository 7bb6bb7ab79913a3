#pragma once

// Run configuration: a plain sectioned key = value file.
//
//   # comment
//   [run]        experiment, seed, output, threads
//   [instance]   truss, load, epsilon
//   [grid]       cells, lo, hi          (2 or 3 numbers each)
//   [lambda]     values                 (ascending, comma or space separated)
//   [solver]     max_iterations, tolerance, objective_tolerance, check_every,
//                primal_step, dual_step
//   [tolerance]  limit, final
//
// Relative instance paths resolve against the config file's directory.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "michell/grid.hpp"
#include "michell/solvers.hpp"

namespace michell::cli {

inline const std::vector<std::string> kExperiments = {"check-integrands", "truss-lp",  "solve-limit",
                                                      "solve-lambda",     "recovery",  "gamma-sweep"};

/// Config errors carry "<file>:<line>: " in their message.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::string output = "michell-out";
    int threads = 1;

    std::string truss_path;
    std::string load_path;
    /// Point-force width; 0 selects 4 cells.
    double epsilon = 0.0;

    std::vector<int> cells{64, 64};
    std::vector<double> lo{0.0, 0.0};
    std::vector<double> hi{1.0, 1.0};

    std::vector<double> lambdas{1e2, 1e3, 1e4};
    /// False while `lambdas` still holds the default (check-integrands then
    /// uses its own list).
    bool lambdas_given = false;
    SolveOptions solver;
    double limit_tolerance = 0.02;
    double final_tolerance = 0.05;

    /// Number of samples for check-integrands.
    std::size_t samples = 100000;

    Grid grid() const;
    /// Every key with its effective value, in section order.
    void echo(std::ostream& out) const;
};

RunConfig parse_config(std::istream& in, const std::string& name = "<config>", const std::string& base_dir = "");
RunConfig parse_config(const std::string& path);

/// "100, 1e3 1e4" → {100, 1000, 10000}; throws std::invalid_argument.
std::vector<double> parse_number_list(const std::string& text);

/// Throws ConfigError (without a line prefix) on invalid combinations.
void validate(const RunConfig& cfg);

}  // namespace michell::cli
