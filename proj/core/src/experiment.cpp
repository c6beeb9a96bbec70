#include "pacset/experiment.hpp"

#include "pacset/errors.hpp"
#include "pacset/parallel.hpp"
#include "pacset/record_io.hpp"
#include "pacset/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

namespace pacset {

namespace {

LevelGrid grid_for(const std::vector<CalibrationRecord>& records,
                   std::span<const std::size_t> cal, std::size_t levels) {
    std::vector<double> samples;
    samples.reserve(cal.size());
    for (std::size_t i : cal) samples.push_back(leaf_nll_total(*records[i].predicted));
    return build_grid(samples, levels, GridOptions{.append_zero = true});
}

// contains() for every record and level of its family.
std::vector<std::vector<bool>> coverage_matrix(const std::vector<MonotoneFamily>& families,
                                               const std::vector<CalibrationRecord>& records,
                                               std::span<const std::size_t> ids) {
    std::vector<std::vector<bool>> covered(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) {
        const MonotoneFamily& f = families[j];
        covered[j].resize(f.levels.size());
        for (std::size_t l = 0; l < f.levels.size(); ++l) {
            covered[j][l] = contains(f.levels[l], *records[ids[j]].truth);
        }
    }
    return covered;
}

std::vector<std::size_t> count_errors(const std::vector<std::vector<bool>>& covered,
                                      std::size_t from, std::size_t to, std::size_t levels) {
    std::vector<std::size_t> errors(levels, 0);
    for (std::size_t j = from; j < to; ++j) {
        for (std::size_t l = 0; l < levels; ++l) errors[l] += covered[j][l] ? 0 : 1;
    }
    return errors;
}

std::vector<MonotoneFamily> build_all(Method method, const std::vector<CalibrationRecord>& records,
                                      std::span<const std::size_t> ids, const LevelGrid& grid,
                                      std::size_t m) {
    std::vector<MonotoneFamily> families(ids.size());
    parallel_for(ids.size(), [&](std::size_t j) {
        families[j] = build_family(method, records[ids[j]].predicted, grid, m);
    });
    return families;
}

double removed_fraction_at(const std::vector<MonotoneFamily>& families, std::size_t from,
                           std::size_t to, std::size_t level) {
    if (to <= from) return 0.0;
    double sum = 0.0;
    for (std::size_t j = from; j < to; ++j) sum += 1.0 - size_metric(families[j].levels[level]);
    return sum / static_cast<double>(to - from);
}

std::string fixed(double x, int digits = 6) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::ofstream open_table(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

} // namespace

void ExperimentConfig::validate() const {
    if (epsilons.empty()) throw InputError("at least one epsilon is required");
    for (double e : epsilons) {
        if (!(e > 0.0 && e < 1.0)) throw InputError("epsilon must lie strictly between 0 and 1");
    }
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie strictly between 0 and 1");
    if (m_values.empty()) throw InputError("at least one m value is required");
    for (std::size_t m : m_values) {
        if (m == 0) throw InputError("m must be positive");
    }
    if (methods.empty()) throw InputError("at least one method is required");
    if (grid_levels < 2) throw InputError("grid_levels must be at least 2");
    if (!(split > 0.0 && split < 1.0)) throw InputError("split must lie strictly between 0 and 1");
    if (trials == 0) throw InputError("trials must be positive");
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::vector<CalibrationRecord>& records) {
    config.validate();
    const std::size_t n = records.size();
    if (n < 2) throw InputError("need at least two records to split");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(config.seed, 0));
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_cal = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(config.split * static_cast<double>(n))), 1, n - 1);
    const std::size_t n_test = n - n_cal;

    const LevelGrid grid = grid_for(records, std::span(order).first(n_cal), config.grid_levels);

    std::vector<ResultRow> rows;
    for (std::size_t m : config.m_values) {
        for (Method method : config.methods) {
            auto base = [&](double eps) {
                ResultRow row;
                row.epsilon = eps;
                row.m = m;
                row.method = method;
                row.n_cal = n_cal;
                row.n_test = n_test;
                return row;
            };
            std::vector<MonotoneFamily> families;
            try {
                families = build_all(method, records, order, grid, m);
            } catch (const std::runtime_error& e) {
                for (double eps : config.epsilons) {
                    ResultRow row = base(eps);
                    row.error = e.what();
                    rows.push_back(std::move(row));
                }
                continue;
            }
            const auto covered = coverage_matrix(families, records, order);
            const auto cal_errors = count_errors(covered, 0, n_cal, grid.size());
            const auto test_errors = count_errors(covered, n_cal, n, grid.size());
            for (double eps : config.epsilons) {
                const CalibrationResult cal =
                    calibrate_from_errors(cal_errors, grid, n_cal, eps, config.delta);
                ResultRow row = base(eps);
                row.chosen_level = cal.chosen_level;
                row.chosen_level_budget = cal.chosen_budget;
                row.fallback = cal.fallback;
                row.calibration_errors = cal.errors_at_level;
                row.calibration_coverage =
                    1.0 - static_cast<double>(cal.errors_at_level) / static_cast<double>(n_cal);
                row.errors = test_errors[cal.chosen_level];
                row.coverage = 1.0 - static_cast<double>(row.errors) / static_cast<double>(n_test);
                row.removed_fraction = removed_fraction_at(families, n_cal, n, cal.chosen_level);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, load_records(config.input));
}

double pac_pass_threshold(double delta, std::size_t trials) {
    return 1.0 - delta - 2.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
}

TrialSummary run_pac_trials(const ExperimentConfig& config,
                            const std::vector<CalibrationRecord>& records) {
    config.validate();
    const std::size_t pool = records.size();
    std::size_t n_cal = config.n_cal;
    std::size_t n_test = config.n_test;
    if (n_cal == 0 && n_test == 0) {
        if (pool < 2) throw InputError("need at least two records to split");
        n_cal = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(config.split * static_cast<double>(pool))), 1,
            pool - 1);
        n_test = pool - n_cal;
    }
    if (n_cal == 0 || n_test == 0) throw InputError("n_cal and n_test must both be positive");
    if (n_cal + n_test > pool) {
        throw InputError("pool of " + std::to_string(pool) + " records is smaller than n_cal + n_test");
    }

    TrialSummary summary;
    summary.epsilon = config.epsilons.front();
    summary.delta = config.delta;
    summary.m = config.m_values.front();
    summary.method = config.methods.front();
    summary.trials = config.trials;
    summary.n_cal = n_cal;
    summary.n_test = n_test;
    summary.coverages.assign(config.trials, 0.0);
    std::vector<double> removed(config.trials, 0.0);

    parallel_for(config.trials, [&](std::size_t t) {
        std::vector<std::size_t> ids(pool);
        std::iota(ids.begin(), ids.end(), std::size_t{0});
        std::mt19937_64 rng(mix_seed(config.seed, 1 + t));
        for (std::size_t i = 0; i < n_cal + n_test; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool - 1);
            std::swap(ids[i], ids[pick(rng)]);
        }
        ids.resize(n_cal + n_test);

        const LevelGrid grid = grid_for(records, std::span(ids).first(n_cal), config.grid_levels);
        const auto families = build_all(summary.method, records, ids, grid, summary.m);
        const auto covered = coverage_matrix(families, records, ids);
        const CalibrationResult cal = calibrate_from_errors(
            count_errors(covered, 0, n_cal, grid.size()), grid, n_cal, summary.epsilon,
            config.delta);
        std::size_t errors = 0;
        for (std::size_t j = n_cal; j < ids.size(); ++j) errors += covered[j][cal.chosen_level] ? 0 : 1;
        summary.coverages[t] = 1.0 - static_cast<double>(errors) / static_cast<double>(n_test);
        removed[t] = removed_fraction_at(families, n_cal, ids.size(), cal.chosen_level);
    });

    for (std::size_t t = 0; t < config.trials; ++t) {
        if (summary.coverages[t] >= 1.0 - summary.epsilon) ++summary.passing;
        summary.mean_coverage += summary.coverages[t];
        summary.mean_removed_fraction += removed[t];
    }
    const auto trials = static_cast<double>(config.trials);
    summary.mean_coverage /= trials;
    summary.mean_removed_fraction /= trials;
    summary.passing_fraction = static_cast<double>(summary.passing) / trials;
    summary.threshold = pac_pass_threshold(config.delta, config.trials);
    summary.passed = summary.passing_fraction >= summary.threshold;
    return summary;
}

void emit_tables(const std::vector<ResultRow>& rows, const std::filesystem::path& dir) {
    if (rows.empty()) throw InputError("no result rows to write");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());

    auto removed = open_table(dir / "removed_fraction.csv");
    auto coverage = open_table(dir / "coverage.csv");
    auto results = open_table(dir / "results.csv");
    removed << "epsilon,m,method,removed_fraction\n";
    coverage << "epsilon,m,method,coverage,calibration_coverage\n";
    results << kResultsHeader << '\n';
    for (const auto& r : rows) {
        const std::string key = fixed(r.epsilon, 4) + ',' + std::to_string(r.m) + ',' + to_string(r.method);
        removed << key << ',' << fixed(r.removed_fraction) << '\n';
        coverage << key << ',' << fixed(r.coverage) << ',' << fixed(r.calibration_coverage) << '\n';
        results << key << ',' << fixed(r.coverage) << ',' << fixed(r.calibration_coverage) << ','
                << fixed(r.removed_fraction) << ',' << r.errors << ',' << r.n_test << ','
                << r.calibration_errors << ',' << r.n_cal << ',' << r.chosen_level << ','
                << fixed(r.chosen_level_budget) << ',' << (r.fallback ? 1 : 0) << ','
                << csv_field(r.error) << '\n';
    }
    for (auto* out : {&removed, &coverage, &results}) {
        out->flush();
        if (!*out) throw InputError("failed writing tables under '" + dir.string() + "'");
    }
}

} // namespace pacset
