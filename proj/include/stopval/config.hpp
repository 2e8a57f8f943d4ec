#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stopval/fees.hpp"
#include "stopval/problem.hpp"

namespace stopval {

/// Config validation failure carrying the offending field path.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_, const std::string& msg)
        : std::runtime_error(field_.empty() ? msg : field_ + ": " + msg),
          field(std::move(field_)) {}
};

struct SolverOptions {
    int grid_points = 201;
    double tol = 1e-6;
    std::size_t tree_budget = 1000000;
    std::uint64_t seed = 12345;
    std::size_t n_max = 200;  // truncation depth for stopping-time sweeps
};

struct QuotaOptions {
    int per_period = 1;
    int total = 1;
};

/// Parsed problem document. Mirrors the JSON schema one to one; `to_problem`
/// assembles the validated solver inputs.
struct ProblemConfig {
    std::vector<std::string> state_labels;
    std::vector<std::string> action_labels;
    std::vector<std::vector<double>> payoffs;  // action x state
    bool include_outside_option = false;
    double discount = 1.0;
    bool horizon_infinite = false;
    int horizon = 0;
    std::vector<double> prior;
    std::vector<std::vector<double>> info_rows;
    std::optional<std::vector<std::vector<double>>> transition_rows;
    std::optional<FeeScheme> fee;
    std::optional<QuotaOptions> quota;
    SolverOptions solver;

    StoppingProblem to_problem() const;
    FeeScheme fee_or_zero() const { return fee ? *fee : FeeScheme::zero(); }
    std::string to_json_text() const;
};

ProblemConfig parse_config_text(const std::string& text);
ProblemConfig load_config(const std::string& path);

/// Rows of numeric/text cells rendered with 10 significant digits, plus a
/// JSON sidecar (config hash, library version, seed) for provenance.
struct ResultTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
    std::string to_csv() const;
};

std::string format_cell(double value);  // %.10g
void write_file(const std::string& path, const std::string& contents);
void write_sidecar(const std::string& csv_path, const std::string& config_text,
                   std::uint64_t seed);

/// FNV-1a over the canonical config text.
std::string config_hash(const std::string& text);

}  // namespace stopval
