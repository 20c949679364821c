#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fiet {

// Outcome of one experiment: a summary object plus a table. Both
// serializations are deterministic for a fixed seed.
struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    bool passed = true;
    std::string gate;  // the bound the experiment was checked against

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    nlohmann::ordered_json to_json() const;
    // First line: "# version=<v> seed=<s> experiment=<name>".
    std::string to_csv() const;
};

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    std::size_t points = 0;
};

// Least squares y = slope * x + intercept. Needs at least two points.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Standard error of a binomial proportion.
double binomial_stderr(double p, std::size_t n);

}  // namespace fiet
