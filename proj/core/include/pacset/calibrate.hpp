#ifndef PACSET_CALIBRATE_HPP
#define PACSET_CALIBRATE_HPP

#include "pacset/ast.hpp"
#include "pacset/family.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pacset {

/// One calibration example: the model's scored prediction and the truth.
struct CalibrationRecord {
    std::string id;
    TreePtr predicted;
    TreePtr truth;
};

/// Largest k in {0..n} with P[Binomial(n, epsilon) <= k] < delta, or
/// nullopt when even k = 0 fails. Computed exactly in log space.
/// Throws InputError unless 0 < epsilon < 1, 0 < delta < 1 and n >= 1.
std::optional<std::size_t> permitted_errors(double epsilon, double delta, std::size_t n);

/// log P[Binomial(n, p) <= k].
double log_binomial_cdf(std::size_t k, std::size_t n, double p);

/// Number of truths outside their family's partial program at `level`.
std::size_t errors_at_level(std::span<const MonotoneFamily> families,
                            std::span<const TreePtr> truths, std::size_t level);

/// Error counts for every level of the shared grid.
std::vector<std::size_t> per_level_errors(std::span<const MonotoneFamily> families,
                                          std::span<const TreePtr> truths);

struct CalibrationResult {
    std::size_t chosen_level = 0;
    double chosen_budget = kNoBudget;
    std::size_t errors_at_level = 0;
    std::optional<std::size_t> permitted; // nullopt: no valid threshold
    bool fallback = false;                // coarsest level used because nothing qualified
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t n = 0;
    std::vector<std::size_t> per_level_errors;
    LevelGrid grid{{kNoBudget}};
};

/// Selects the loosest level whose error count fits k(epsilon, delta, n);
/// falls back to the coarsest level when none does.
/// Throws InputError for an empty or inconsistent calibration set.
CalibrationResult calibrate(std::span<const MonotoneFamily> families,
                            std::span<const TreePtr> truths, double epsilon, double delta);

/// Same selection rule from precomputed error counts.
CalibrationResult calibrate_from_errors(std::vector<std::size_t> level_errors,
                                        const LevelGrid& grid, std::size_t n, double epsilon,
                                        double delta);

/// Partial program of `family` at the calibrated level.
/// Throws InputError when the family was built on a different grid.
const PartialTree& predict(const MonotoneFamily& family, const CalibrationResult& result);

} // namespace pacset

#endif // PACSET_CALIBRATE_HPP
