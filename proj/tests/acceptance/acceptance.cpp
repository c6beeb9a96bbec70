// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is nonzero when any criterion fails, unless its number was
// passed with --allow-fail; the FAIL line is printed either way.

#include "pacset/calibrate.hpp"
#include "pacset/errors.hpp"
#include "pacset/experiment.hpp"
#include "pacset/family.hpp"
#include "pacset/record_io.hpp"
#include "pacset/synthetic.hpp"

#include "exact_binomial.hpp"
#include "test_trees.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace pacset;
namespace pt = pacset::testing;
using pacset::testing::Rng;

namespace {

// Criterion 1
constexpr std::size_t kExactTrees = 300;
constexpr std::size_t kExactMaxNodes = 10;
constexpr double kExactSeconds = 60.0;

// Criterion 3
constexpr std::uint64_t kPoolSeed = 2024;
constexpr std::size_t kPoolSize = 5000;
constexpr std::size_t kPacCal = 500;
constexpr std::size_t kPacTest = 2000;
constexpr std::size_t kPacTrials = 100;
constexpr double kPacEpsilon = 0.1;
constexpr double kPacDelta = 0.1;
constexpr double kLevelOneTarget = 0.7;
constexpr double kLevelOneTolerance = 0.05;
constexpr double kPacSeconds = 600.0;

// Criterion 4
constexpr std::size_t kTrendRecords = 4000;
constexpr std::size_t kTrendGridLevels = 32;
constexpr std::uint64_t kTrendSeed = 5;

// Criterion 6
constexpr std::size_t kNestingChains = 1000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

const std::vector<CalibrationRecord>& pool() {
    static const std::vector<CalibrationRecord> records = [] {
        SyntheticConfig cfg;
        cfg.seed = kPoolSeed;
        return generate_synthetic(cfg, kPoolSize);
    }();
    return records;
}

Outcome ilp_exactness() {
    const auto start = Clock::now();
    Rng rng(101);
    std::size_t instances = 0;
    std::size_t mismatches = 0;
    std::string first;
    for (std::size_t t = 0; t < kExactTrees; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, kExactMaxNodes)(rng);
        const auto tree = pt::random_tree(rng, n);
        for (std::size_t m : {1, 2}) {
            for (std::size_t levels = 1; levels <= 3; ++levels) {
                const LevelGrid grid = pt::random_grid(rng, *tree, levels);
                ++instances;
                std::size_t exact = 0;
                std::size_t oracle = 0;
                bool exact_ok = true;
                bool oracle_ok = true;
                try {
                    exact = solve_ilp_family(*tree, grid, m).objective;
                } catch (const InfeasibleError&) {
                    exact_ok = false;
                }
                try {
                    oracle = brute_force_family(*tree, grid, m).objective;
                } catch (const InfeasibleError&) {
                    oracle_ok = false;
                }
                if (exact_ok != oracle_ok || exact != oracle) {
                    if (mismatches++ == 0) {
                        first = "tree " + std::to_string(t) + " m " + std::to_string(m);
                    }
                }
            }
        }
    }
    const double secs = seconds_since(start);
    Outcome o;
    o.pass = mismatches == 0 && secs < kExactSeconds;
    o.detail = std::to_string(instances) + " instances, " + std::to_string(mismatches)
               + " objective mismatches" + (first.empty() ? "" : " (first: " + first + ")") + ", "
               + fmt("%.2f", secs) + " s (limit " + fmt("%.0f", kExactSeconds) + " s)";
    return o;
}

Outcome permitted_oracle() {
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
        for (double delta : {0.01, 0.05, 0.1, 0.3}) {
            for (std::size_t n = 1; n <= 100; ++n) {
                ++checked;
                if (permitted_errors(eps, delta, n) != pt::exact_permitted(eps, delta, n)) {
                    ++mismatches;
                }
            }
        }
    }
    const bool hand = permitted_errors(0.3, 0.1, 10) == std::optional<std::size_t>(0)
                      && permitted_errors(0.5, 0.3, 2) == std::optional<std::size_t>(0);
    return {mismatches == 0 && hand, std::to_string(checked) + " (eps, delta, n) cases, "
                                         + std::to_string(mismatches) + " mismatches; hand cases "
                                         + (hand ? "ok" : "wrong")};
}

Outcome pac_validity() {
    const auto start = Clock::now();
    const auto& records = pool();
    std::size_t exact = 0;
    for (const auto& r : records) exact += same_structure(*r.predicted, *r.truth);
    const double level_one = static_cast<double>(exact) / static_cast<double>(records.size());

    ExperimentConfig cfg;
    cfg.epsilons = {kPacEpsilon};
    cfg.delta = kPacDelta;
    cfg.m_values = {1};
    cfg.methods = {Method::Ilp};
    cfg.trials = kPacTrials;
    cfg.n_cal = kPacCal;
    cfg.n_test = kPacTest;
    const TrialSummary s = run_pac_trials(cfg, records);
    const double secs = seconds_since(start);
    const bool tuned = std::abs(level_one - kLevelOneTarget) <= kLevelOneTolerance;

    Outcome o;
    o.pass = s.passed && tuned && secs < kPacSeconds;
    o.detail = std::to_string(s.passing) + "/" + std::to_string(s.trials) + " trials with coverage >= "
               + fmt("%.2f", 1.0 - kPacEpsilon) + " (need " + fmt("%.3f", s.threshold)
               + "), mean coverage " + fmt("%.4f", s.mean_coverage) + ", level-1 coverage "
               + fmt("%.3f", level_one) + ", " + fmt("%.1f", secs) + " s";
    return o;
}

Outcome trend_reproduction() {
    const auto& all = pool();
    const std::vector<CalibrationRecord> records(all.begin(), all.begin() + kTrendRecords);
    ExperimentConfig cfg;
    cfg.epsilons = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    cfg.m_values = {1, 2, 3};
    cfg.methods = {Method::Ilp, Method::Greedy};
    cfg.grid_levels = kTrendGridLevels;
    cfg.seed = kTrendSeed;
    const auto rows = run_experiment(cfg, records);

    std::vector<std::string> failures;
    std::map<std::pair<std::size_t, Method>, std::vector<const ResultRow*>> series;
    for (const auto& r : rows) {
        if (!r.error.empty()) failures.push_back("error: " + r.error);
        if (r.calibration_coverage < 1.0 - r.epsilon) {
            failures.push_back("(a) calibration coverage " + fmt("%.4f", r.calibration_coverage)
                               + " < 1-eps at eps " + fmt("%.2f", r.epsilon) + " m "
                               + std::to_string(r.m) + " " + to_string(r.method));
        }
        series[{r.m, r.method}].push_back(&r);
    }
    for (const auto& [key, s] : series) {
        const std::string tag = "m " + std::to_string(key.first) + " " + to_string(key.second);
        // Trend only: least-squares slope of test coverage against epsilon.
        double mx = 0, my = 0;
        for (const auto* r : s) {
            mx += r->epsilon;
            my += r->coverage;
        }
        mx /= static_cast<double>(s.size());
        my /= static_cast<double>(s.size());
        double sxy = 0, sxx = 0;
        for (const auto* r : s) {
            sxy += (r->epsilon - mx) * (r->coverage - my);
            sxx += (r->epsilon - mx) * (r->epsilon - mx);
        }
        if (!(sxy / sxx < 0)) failures.push_back("(a) test coverage does not fall with eps, " + tag);
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i]->removed_fraction > s[i - 1]->removed_fraction) {
                failures.push_back("(b) removed fraction rises at eps " + fmt("%.2f", s[i]->epsilon)
                                   + ", " + tag);
            }
        }
    }
    std::size_t c_checked = 0;
    for (std::size_t m : cfg.m_values) {
        const auto& ilp = series[{m, Method::Ilp}];
        const auto& greedy = series[{m, Method::Greedy}];
        for (std::size_t i = 0; i < ilp.size(); ++i) {
            ++c_checked;
            if (ilp[i]->removed_fraction > greedy[i]->removed_fraction) {
                failures.push_back("(c) ilp " + fmt("%.4f", ilp[i]->removed_fraction) + " > greedy "
                                   + fmt("%.4f", greedy[i]->removed_fraction) + " at eps "
                                   + fmt("%.2f", ilp[i]->epsilon) + " m " + std::to_string(m));
            }
        }
    }

    Outcome o;
    o.pass = failures.empty();
    o.detail = std::to_string(rows.size()) + " rows, " + std::to_string(c_checked)
               + " ilp/greedy pairs, grid " + std::to_string(kTrendGridLevels) + " levels";
    if (!failures.empty()) {
        o.detail += "; " + std::to_string(failures.size()) + " violations:";
        for (const auto& f : failures) o.detail += "\n      " + f;
    }
    return o;
}

Outcome fixtures() {
    const auto list = load_fixtures(std::string(PACSET_FIXTURE_DIR) + "/worked_examples.jsonl");
    std::size_t ok = 0;
    std::string detail;
    for (const auto& f : list) {
        const PartialTree p = remove_subtrees(f.record.predicted, f.remove, f.max_holes);
        const bool member = contains(p, *f.record.truth);
        const std::string text = render(p).text();
        const bool good = member == f.expect_contains && same_text_ignoring_space(text, f.expect_render);
        ok += good;
        if (!good) {
            detail += "\n      " + f.record.id + ": contains " + (member ? "true" : "false")
                      + " (expected " + (f.expect_contains ? "true" : "false") + "), render \""
                      + text + "\" (expected \"" + f.expect_render + "\")";
        }
    }
    return {!list.empty() && ok == list.size(),
            std::to_string(ok) + "/" + std::to_string(list.size()) + " fixtures reproduced" + detail};
}

Outcome properties() {
    Rng rng(606);
    std::map<std::string, std::size_t> failures;
    std::map<std::string, std::size_t> checks;
    auto check = [&](const std::string& name, bool ok) {
        ++checks[name];
        if (!ok) ++failures[name];
    };

    // Membership nesting along growing removal chains.
    for (std::size_t c = 0; c < kNestingChains; ++c) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 14)(rng);
        const auto tree = pt::random_tree(rng, n, {"a", "b"});
        std::vector<NodeId> roots;
        std::vector<PartialTree> chain{remove_subtrees(tree, roots)};
        for (int step = 0; step < 3; ++step) {
            roots.push_back(static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)));
            chain.push_back(remove_subtrees(tree, roots));
        }
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            for (int k = 0; k < 3; ++k) {
                const auto target = k == 0 ? pt::random_completion(chain[i], rng)
                                           : pt::random_tree(rng, n, {"a", "b"});
                check("membership nesting",
                      !contains(chain[i], *target) || contains(chain[i + 1], *target));
            }
        }
    }

    // NLL decomposition.
    for (int t = 0; t < 1000; ++t) {
        const auto tree = pt::random_tree(rng, std::uniform_int_distribution<std::size_t>(1, 40)(rng));
        const PartialTree p = remove_subtrees(tree, pt::random_roots(rng, *tree, 4));
        double removed = 0.0;
        for (NodeId h : p.holes()) removed += tree->subtree_nll(h);
        const double total = leaf_nll_total(*tree);
        check("nll decomposition",
              std::abs(leaf_nll_total(p) + removed - total) <= 1e-12 * std::max(1.0, total));
    }

    // Families over a synthetic corpus.
    SyntheticConfig scfg;
    scfg.seed = 77;
    scfg.p_corrupt = 0.06;
    const auto records = generate_synthetic(scfg, 300);
    std::vector<double> nlls;
    for (const auto& r : records) nlls.push_back(leaf_nll_total(*r.predicted));
    const LevelGrid grid = build_grid(nlls, 10, {.append_zero = true});
    std::vector<FamilyEntry> entries;
    for (Method method : {Method::Ilp, Method::Greedy}) {
        for (std::size_t m : {1, 2, 3}) {
            std::vector<MonotoneFamily> families;
            std::vector<TreePtr> truths;
            for (const auto& r : records) {
                MonotoneFamily f = build_family(method, r.predicted, grid, m);
                for (std::size_t l = 0; l < f.levels.size(); ++l) {
                    check("hole bound", f.levels[l].hole_count() <= m);
                    if (l == 0) continue;
                    const PartialTree& prev = f.levels[l - 1];
                    const PartialTree& cur = f.levels[l];
                    bool nested = true;
                    for (NodeId v = 0; v < r.predicted->size(); ++v) {
                        if (prev.is_removed(v) && !cur.is_removed(v)) nested = false;
                    }
                    nested = nested && (!contains(prev, *r.truth) || contains(cur, *r.truth));
                    check("family nesting", nested);
                }
                families.push_back(f);
                truths.push_back(r.truth);
                if (m == 2) entries.push_back({r, std::move(f), method, m});
            }
            const auto errors = per_level_errors(families, truths);
            for (std::size_t l = 1; l < errors.size(); ++l) {
                check("per-level error monotonicity", errors[l] <= errors[l - 1]);
            }
        }
    }

    // Serialization round trips.
    {
        std::stringstream buf;
        write_records(buf, records);
        const auto back = read_records(buf);
        bool same = back.size() == records.size();
        for (std::size_t i = 0; same && i < back.size(); ++i) {
            same = back[i].id == records[i].id && *back[i].predicted == *records[i].predicted
                   && *back[i].truth == *records[i].truth;
        }
        check("serialization round-trip", same);
    }
    {
        std::stringstream buf;
        write_families(buf, entries);
        const auto back = read_families(buf);
        bool same = back.size() == entries.size();
        for (std::size_t i = 0; same && i < back.size(); ++i) {
            same = back[i].family.grid == entries[i].family.grid && back[i].method == entries[i].method;
            for (std::size_t l = 0; same && l < grid.size(); ++l) {
                const auto a = back[i].family.levels[l].holes();
                const auto b = entries[i].family.levels[l].holes();
                same = std::equal(a.begin(), a.end(), b.begin(), b.end());
            }
        }
        check("serialization round-trip", same);
    }
    {
        const auto cal = calibrate_from_errors({50, 20, 3, 0}, LevelGrid({kNoBudget, 2.0, 1.0, 0.0}),
                                               200, 0.05, 0.1);
        const auto back = calibration_from_json(calibration_to_json(cal));
        check("serialization round-trip", back.chosen_level == cal.chosen_level
                                              && back.per_level_errors == cal.per_level_errors
                                              && back.grid == cal.grid);
    }

    std::size_t failed = 0;
    std::string detail;
    for (const auto& [name, count] : checks) {
        const std::size_t bad = failures.count(name) ? failures.at(name) : 0;
        failed += bad;
        if (!detail.empty()) detail += ", ";
        detail += name + " " + std::to_string(count - bad) + "/" + std::to_string(count);
    }
    return {failed == 0, detail};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> allowed;
    std::vector<int> only;
    app.add_option("--allow-fail", allowed, "Criterion whose failure does not set the exit status");
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"ilp exactness vs brute force", ilp_exactness},
        {"permitted-error oracle", permitted_oracle},
        {"pac validity at desk scale", pac_validity},
        {"trend reproduction", trend_reproduction},
        {"worked-example fixtures", fixtures},
        {"property suites", properties},
    };

    int status = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const bool tolerated = std::find(allowed.begin(), allowed.end(), number) != allowed.end();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << number << ". " << criteria[i].first
                  << ": " << o.detail << (o.pass || !tolerated ? "" : "  [known failure]") << '\n'
                  << std::flush;
        if (!o.pass && !tolerated) status = 1;
    }
    return status;
}
