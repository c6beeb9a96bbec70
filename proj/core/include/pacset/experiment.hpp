#ifndef PACSET_EXPERIMENT_HPP
#define PACSET_EXPERIMENT_HPP

#include "pacset/calibrate.hpp"
#include "pacset/family.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pacset {

struct ExperimentConfig {
    std::vector<double> epsilons{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    double delta = 0.1;
    std::vector<std::size_t> m_values{1, 2};
    std::size_t grid_levels = 8;
    std::vector<Method> methods{Method::Ilp, Method::Greedy};
    double split = 0.5; // calibration share of the records
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    // Trial sizes for run_pac_trials; 0 splits the whole pool by `split`.
    std::size_t n_cal = 0;
    std::size_t n_test = 0;
    std::filesystem::path input;
    std::filesystem::path output;

    /// Throws InputError when a field is out of range.
    void validate() const;
};

struct ResultRow {
    double epsilon = 0.0;
    std::size_t m = 0;
    Method method = Method::Ilp;
    double coverage = 0.0;             // test split, 1 - errors / n_test
    double calibration_coverage = 0.0; // calibration split at the chosen level
    double removed_fraction = 0.0;     // mean over test records of 1 - size_metric
    std::size_t errors = 0;
    std::size_t n_test = 0;
    std::size_t calibration_errors = 0;
    std::size_t n_cal = 0;
    std::size_t chosen_level = 0;
    double chosen_level_budget = kNoBudget;
    bool fallback = false;
    std::string error; // non-empty when this configuration could not run
};

/// Splits `records` once (seeded), builds the grid from calibration NLLs,
/// then reports one row per (m, method, epsilon), in that nesting order.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::vector<CalibrationRecord>& records);

/// Loads records from config.input first.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

struct TrialSummary {
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t m = 0;
    Method method = Method::Ilp;
    std::size_t trials = 0;
    std::size_t n_cal = 0;
    std::size_t n_test = 0;
    std::size_t passing = 0;          // trials whose test coverage >= 1 - epsilon
    double passing_fraction = 0.0;
    double threshold = 0.0;           // 1 - delta minus two binomial standard errors
    bool passed = false;
    double mean_coverage = 0.0;
    double mean_removed_fraction = 0.0;
    std::vector<double> coverages;    // one per trial
};

/// Repeats split, grid, build and calibration over independent resamples
/// drawn without replacement. Uses the first epsilon, m and method.
TrialSummary run_pac_trials(const ExperimentConfig& config,
                            const std::vector<CalibrationRecord>& records);

/// 1 - delta - 2 sqrt(delta (1 - delta) / trials).
double pac_pass_threshold(double delta, std::size_t trials);

/// Column orders (first line of each file):
///   removed_fraction.csv: epsilon,m,method,removed_fraction
///   coverage.csv:         epsilon,m,method,coverage,calibration_coverage
///   results.csv:          every ResultRow field, see kResultsHeader
/// Creates `dir` if needed; throws InputError when it cannot be written.
void emit_tables(const std::vector<ResultRow>& rows, const std::filesystem::path& dir);

inline constexpr const char* kResultsHeader =
    "epsilon,m,method,coverage,calibration_coverage,removed_fraction,errors,n_test,"
    "calibration_errors,n_cal,chosen_level,chosen_level_budget,fallback,error";

} // namespace pacset

#endif // PACSET_EXPERIMENT_HPP
