#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>


namespace michell::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& tok) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    const auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || p != end || tok.empty()) throw std::invalid_argument("malformed number '" + tok + "'");
    return v;
}

template <class T>
T to_integer(const std::string& tok) {
    T v{};
    const char* end = tok.data() + tok.size();
    const auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || p != end || tok.empty()) throw std::invalid_argument("malformed integer '" + tok + "'");
    return v;
}

// shortest round-trip spelling
std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

std::string resolve(const std::string& base, const std::string& p) {
    if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) return p;
    return (std::filesystem::path(base) / p).lexically_normal().string();
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    for (std::string tok; in >> tok;) out.push_back(to_double(tok));
    return out;
}

Grid RunConfig::grid() const {
    const int d = static_cast<int>(cells.size());
    std::array<int, 3> c{1, 1, 1};
    std::array<double, 3> l{0, 0, 0}, h{1, 1, 1};
    for (int a = 0; a < d; ++a) c[a] = cells[a], l[a] = lo[a], h[a] = hi[a];
    return Grid(d, c, l, h);
}

void RunConfig::echo(std::ostream& out) const {
    std::vector<double> c(cells.begin(), cells.end());
    out << "[run]\nexperiment = " << experiment << "\nseed = " << seed << "\noutput = " << output
        << "\nthreads = " << threads << "\nsamples = " << samples << "\n"
        << "[instance]\ntruss = " << truss_path << "\nload = " << load_path
        << "\nepsilon = " << num(epsilon) << "\n"
        << "[grid]\ncells = " << join(c) << "\nlo = " << join(lo) << "\nhi = " << join(hi) << "\n"
        << "[lambda]\nvalues = " << join(lambdas) << "\n"
        << "[solver]\nmax_iterations = " << solver.max_iterations << "\ntolerance = " << num(solver.tolerance)
        << "\nobjective_tolerance = " << num(solver.objective_tolerance)
        << "\ncheck_every = " << solver.check_every << "\nprimal_step = " << num(solver.primal_step)
        << "\ndual_step = " << num(solver.dual_step) << "\n"
        << "[tolerance]\nlimit = " << num(limit_tolerance) << "\nfinal = " << num(final_tolerance)
        << "\n";
}

void validate(const RunConfig& cfg) {
    if (!cfg.experiment.empty() &&
        std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end())
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    const std::size_t d = cfg.cells.size();
    if (d != 2 && d != 3) throw ConfigError("grid cells needs 2 or 3 entries");
    if (cfg.lo.size() != d || cfg.hi.size() != d) throw ConfigError("grid lo/hi must match the cells dimension");
    for (std::size_t a = 0; a < d; ++a) {
        if (cfg.cells[a] < 1) throw ConfigError("grid cells must be positive");
        if (!(cfg.hi[a] > cfg.lo[a])) throw ConfigError("grid hi must exceed lo");
    }
    if (cfg.lambdas.empty()) throw ConfigError("lambda list is empty");
    for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        if (!(cfg.lambdas[i] > 0.0)) throw ConfigError("lambda values must be positive");
        if (i > 0 && !(cfg.lambdas[i] > cfg.lambdas[i - 1])) throw ConfigError("lambda list not ascending");
    }
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
    if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
    if (cfg.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
    if (!(cfg.limit_tolerance > 0.0) || !(cfg.final_tolerance > 0.0)) throw ConfigError("tolerances must be positive");
    try {
        cfg.solver.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    for (const std::string* p : {&cfg.truss_path, &cfg.load_path})
        if (!p->empty() && !std::filesystem::exists(*p)) throw ConfigError("file not found: " + *p);
}

RunConfig parse_config(std::istream& in, const std::string& name, const std::string& base_dir) {
    RunConfig cfg;
    using Setter = std::function<void(const std::string&)>;
    const std::map<std::string, std::map<std::string, Setter>> keys = {
        {"run",
         {{"experiment", [&](const std::string& v) { cfg.experiment = v; }},
          {"seed", [&](const std::string& v) { cfg.seed = to_integer<std::uint64_t>(v); }},
          {"output", [&](const std::string& v) { cfg.output = resolve(base_dir, v); }},
          {"threads", [&](const std::string& v) { cfg.threads = to_integer<int>(v); }},
          {"samples", [&](const std::string& v) { cfg.samples = to_integer<std::size_t>(v); }}}},
        {"instance",
         {{"truss", [&](const std::string& v) { cfg.truss_path = resolve(base_dir, v); }},
          {"load", [&](const std::string& v) { cfg.load_path = resolve(base_dir, v); }},
          {"epsilon", [&](const std::string& v) { cfg.epsilon = to_double(v); }}}},
        {"grid",
         {{"cells",
           [&](const std::string& v) {
               cfg.cells.clear();
               for (double x : parse_number_list(v)) {
                   if (x != static_cast<int>(x)) throw std::invalid_argument("cell counts must be integers");
                   cfg.cells.push_back(static_cast<int>(x));
               }
           }},
          {"lo", [&](const std::string& v) { cfg.lo = parse_number_list(v); }},
          {"hi", [&](const std::string& v) { cfg.hi = parse_number_list(v); }}}},
        {"lambda", {{"values",
                     [&](const std::string& v) {
                         cfg.lambdas = parse_number_list(v);
                         cfg.lambdas_given = true;
                     }}}},
        {"solver",
         {{"max_iterations", [&](const std::string& v) { cfg.solver.max_iterations = to_integer<int>(v); }},
          {"tolerance", [&](const std::string& v) { cfg.solver.tolerance = to_double(v); }},
          {"objective_tolerance", [&](const std::string& v) { cfg.solver.objective_tolerance = to_double(v); }},
          {"check_every", [&](const std::string& v) { cfg.solver.check_every = to_integer<int>(v); }},
          {"primal_step", [&](const std::string& v) { cfg.solver.primal_step = to_double(v); }},
          {"dual_step", [&](const std::string& v) { cfg.solver.dual_step = to_double(v); }}}},
        {"tolerance",
         {{"limit", [&](const std::string& v) { cfg.limit_tolerance = to_double(v); }},
          {"final", [&](const std::string& v) { cfg.final_tolerance = to_double(v); }}}},
    };

    std::string section, line;
    int lineno = 0, lambda_line = 0;
    auto fail = [&](const std::string& msg) { throw ConfigError(name + ":" + std::to_string(lineno) + ": " + msg); };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!keys.count(section)) fail("unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (section.empty()) fail("key '" + key + "' outside a section");
        const auto& table = keys.at(section);
        const auto it = table.find(key);
        if (it == table.end()) fail("unknown key '" + key + "' in [" + section + "]");
        if (value.empty()) fail("missing value for '" + key + "'");
        try {
            it->second(value);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        } catch (const std::out_of_range& e) {
            fail(e.what());
        }
        if (section == "lambda") lambda_line = lineno;
    }
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        // point list errors at the line that set the list
        if (lambda_line > 0 && std::string(e.what()).find("lambda") != std::string::npos) lineno = lambda_line;
        fail(e.what());
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open");
    return parse_config(f, path, std::filesystem::path(path).parent_path().string());
}

}  // namespace michell::cli
