#include "pacset/calibrate.hpp"

#include "pacset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pacset {

namespace {

double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0)
           - std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_unit_interval(double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) {
        throw InputError(std::string(name) + " must lie strictly between 0 and 1");
    }
}

} // namespace

double log_binomial_cdf(std::size_t k, std::size_t n, double p) {
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    double acc = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= std::min(k, n); ++i) {
        acc = log_add(acc, log_choose(n, i) + static_cast<double>(i) * log_p
                               + static_cast<double>(n - i) * log_q);
    }
    return acc;
}

std::optional<std::size_t> permitted_errors(double epsilon, double delta, std::size_t n) {
    check_unit_interval(epsilon, "epsilon");
    check_unit_interval(delta, "delta");
    if (n == 0) throw InputError("calibration size n must be at least 1");

    const double log_delta = std::log(delta);
    const double log_p = std::log(epsilon);
    const double log_q = std::log1p(-epsilon);
    std::optional<std::size_t> k;
    double acc = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= n; ++i) {
        acc = log_add(acc, log_choose(n, i) + static_cast<double>(i) * log_p
                               + static_cast<double>(n - i) * log_q);
        if (!(acc < log_delta)) break;
        k = i;
    }
    return k;
}

std::size_t errors_at_level(std::span<const MonotoneFamily> families,
                            std::span<const TreePtr> truths, std::size_t level) {
    if (families.size() != truths.size()) {
        throw InputError("got " + std::to_string(families.size()) + " families but "
                         + std::to_string(truths.size()) + " truths");
    }
    std::size_t errors = 0;
    for (std::size_t j = 0; j < families.size(); ++j) {
        if (level >= families[j].levels.size()) {
            throw InputError("level " + std::to_string(level) + " is outside family "
                             + std::to_string(j));
        }
        if (!contains(families[j].levels[level], *truths[j])) ++errors;
    }
    return errors;
}

std::vector<std::size_t> per_level_errors(std::span<const MonotoneFamily> families,
                                          std::span<const TreePtr> truths) {
    if (families.empty()) return {};
    std::vector<std::size_t> counts;
    for (std::size_t level = 0; level < families.front().grid.size(); ++level) {
        counts.push_back(errors_at_level(families, truths, level));
    }
    return counts;
}

CalibrationResult calibrate_from_errors(std::vector<std::size_t> level_errors,
                                        const LevelGrid& grid, std::size_t n, double epsilon,
                                        double delta) {
    if (n == 0) throw InputError("calibration set is empty");
    if (level_errors.size() != grid.size()) {
        throw InputError("error counts do not match the grid");
    }
    for (std::size_t i = 1; i < level_errors.size(); ++i) {
        if (level_errors[i] > level_errors[i - 1]) {
            throw std::logic_error("error counts increase at level " + std::to_string(i)
                                   + "; the family is not nested");
        }
    }

    CalibrationResult result;
    result.epsilon = epsilon;
    result.delta = delta;
    result.n = n;
    result.permitted = permitted_errors(epsilon, delta, n);
    result.grid = grid;

    std::optional<std::size_t> chosen;
    if (result.permitted) {
        for (std::size_t i = 0; i < level_errors.size(); ++i) {
            if (level_errors[i] <= *result.permitted) {
                chosen = i;
                break;
            }
        }
    }
    result.fallback = !chosen.has_value();
    result.chosen_level = chosen.value_or(grid.size() - 1);
    result.chosen_budget = grid[result.chosen_level];
    result.errors_at_level = level_errors[result.chosen_level];
    result.per_level_errors = std::move(level_errors);
    return result;
}

CalibrationResult calibrate(std::span<const MonotoneFamily> families,
                            std::span<const TreePtr> truths, double epsilon, double delta) {
    if (families.empty()) throw InputError("calibration set is empty");
    const LevelGrid& grid = families.front().grid;
    for (const auto& family : families) {
        if (!(family.grid == grid)) throw InputError("families do not share one level grid");
    }
    return calibrate_from_errors(per_level_errors(families, truths), grid, families.size(),
                                 epsilon, delta);
}

const PartialTree& predict(const MonotoneFamily& family, const CalibrationResult& result) {
    if (!(family.grid == result.grid)) {
        throw InputError("family grid differs from the calibrated grid");
    }
    return family.levels.at(result.chosen_level);
}

} // namespace pacset
