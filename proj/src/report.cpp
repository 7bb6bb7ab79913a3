#include "michell/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "michell/errors.hpp"

namespace michell {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ExperimentReport::ExperimentReport(std::string name, std::vector<std::string> columns, std::uint64_t seed)
    : name_(std::move(name)), columns_(std::move(columns)), seed_(seed) {}

void ExperimentReport::set_parameter(const std::string& key, const std::string& value) {
    for (auto& [k, v] : params_)
        if (k == key) {
            v = value;
            return;
        }
    params_.emplace_back(key, value);
}

void ExperimentReport::add_row(std::vector<double> row) {
    if (row.size() != columns_.size())
        throw ShapeMismatch("report '" + name_ + "': row has " + std::to_string(row.size()) +
                            " values for " + std::to_string(columns_.size()) + " columns");
    rows_.push_back(std::move(row));
}

std::vector<double> ExperimentReport::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns_.size(); ++c)
        if (columns_[c] == name) {
            std::vector<double> out;
            for (const auto& r : rows_) out.push_back(r[c]);
            return out;
        }
    throw InvalidInput("report '" + name_ + "' has no column '" + name + "'");
}

const Check& ExperimentReport::add_check(const std::string& name, double value, double tolerance,
                                         Check::Relation rel) {
    Check c{name, value, tolerance, rel, false};
    // NaN never passes
    c.passed = rel == Check::Relation::AtMost ? value <= tolerance : value >= tolerance;
    checks_.push_back(c);
    return checks_.back();
}

bool ExperimentReport::passed() const {
    for (const auto& c : checks_)
        if (!c.passed) return false;
    return true;
}

void ExperimentReport::write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
        out << '\n';
    }
}

void ExperimentReport::write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path + "'");
    write_csv(f);
}

void ExperimentReport::write_summary(std::ostream& out) const {
    out << "experiment = " << name_ << '\n';
    out << "version = " << kVersion << '\n';
    out << "seed = " << seed_ << '\n';
    for (const auto& [k, v] : params_) out << k << " = " << v << '\n';
    for (const auto& c : checks_)
        out << "check " << c.name << " = " << format_number(c.value)
            << (c.relation == Check::Relation::AtMost ? " <= " : " >= ") << format_number(c.tolerance)
            << (c.passed ? "  PASS" : "  FAIL") << '\n';
}

}  // namespace michell
