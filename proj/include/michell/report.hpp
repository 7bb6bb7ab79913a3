#pragma once

// Tabular experiment record: named numeric columns, declared checks with
// their tolerances, and provenance. CSV output is deterministic (fixed
// formatting, no timestamps) so identical inputs give identical bytes.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace michell {

/// Version string written into reports and manifests.
inline constexpr const char* kVersion = "michell 1.0.0";

struct Check {
    enum class Relation { AtMost, AtLeast };
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    Relation relation = Relation::AtMost;
    bool passed = false;
};

class ExperimentReport {
public:
    ExperimentReport(std::string name, std::vector<std::string> columns, std::uint64_t seed = 0);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    const std::vector<Check>& checks() const { return checks_; }
    std::uint64_t seed() const { return seed_; }

    void set_parameter(const std::string& key, const std::string& value);
    const std::vector<std::pair<std::string, std::string>>& parameters() const { return params_; }

    /// Appends a row; throws ShapeMismatch unless it has one value per column.
    void add_row(std::vector<double> row);
    /// Column values by name; throws InvalidInput for an unknown column.
    std::vector<double> column(const std::string& name) const;

    /// Records a check; pass/fail is decided here from value and tolerance.
    const Check& add_check(const std::string& name, double value, double tolerance,
                           Check::Relation rel = Check::Relation::AtMost);
    bool passed() const;

    /// Rows only, header first, values with %.17g.
    void write_csv(std::ostream& out) const;
    void write_csv(const std::string& path) const;
    /// Parameters, provenance and check outcomes as "key = value" lines.
    void write_summary(std::ostream& out) const;

private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
    std::vector<Check> checks_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::uint64_t seed_;
};

/// %.17g, with "nan"/"inf" spelled portably.
std::string format_number(double v);

}  // namespace michell
