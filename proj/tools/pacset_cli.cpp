// pacset: build, calibrate and evaluate PAC prediction sets of partial programs.

#include "pacset/calibrate.hpp"
#include "pacset/errors.hpp"
#include "pacset/experiment.hpp"
#include "pacset/family.hpp"
#include "pacset/parallel.hpp"
#include "pacset/record_io.hpp"
#include "pacset/synthetic.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace pacset;

namespace {

struct Options {
    std::vector<double> epsilons;
    double delta = 0.1;
    std::vector<std::size_t> m_values;
    std::size_t grid_levels = 8;
    std::vector<std::string> methods;
    double split = 0.5;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::string input;
    std::string output;

    // gen
    std::size_t count = 1000;
    SyntheticConfig synth;
    // build
    std::string grid_from;
    // eval
    std::string calibration;
    // e2e
    bool pac = false;
    std::size_t n_cal = 0;
    std::size_t n_test = 0;
};

void emit(const json& j, const std::string& output) {
    if (output.empty()) {
        std::cout << j.dump() << '\n';
        return;
    }
    std::ofstream out(output, std::ios::trunc);
    if (!out) throw InputError("cannot open '" + output + "' for writing");
    out << j.dump() << '\n';
}

std::vector<Method> methods_of(const Options& o) {
    std::vector<Method> out;
    for (const auto& s : o.methods) out.push_back(parse_method(s));
    if (out.empty()) out = {Method::Ilp};
    return out;
}

ExperimentConfig experiment_config(const Options& o) {
    ExperimentConfig c;
    if (!o.epsilons.empty()) c.epsilons = o.epsilons;
    c.delta = o.delta;
    if (!o.m_values.empty()) c.m_values = o.m_values;
    c.grid_levels = o.grid_levels;
    if (!o.methods.empty()) c.methods = methods_of(o);
    c.split = o.split;
    c.trials = o.trials;
    c.seed = o.seed;
    c.n_cal = o.n_cal;
    c.n_test = o.n_test;
    c.input = o.input;
    c.output = o.output;
    return c;
}

LevelGrid grid_from_records(const std::vector<CalibrationRecord>& records, std::size_t levels) {
    std::vector<double> samples;
    for (const auto& r : records) samples.push_back(leaf_nll_total(*r.predicted));
    return build_grid(samples, levels, GridOptions{.append_zero = true});
}

void run_gen(const Options& o) {
    SyntheticConfig cfg = o.synth;
    cfg.seed = o.seed;
    const auto records = generate_synthetic(cfg, o.count);
    if (o.output.empty()) {
        write_records(std::cout, records);
    } else {
        save_records(records, o.output);
    }
}

void run_build(const Options& o) {
    const auto records = load_records(o.input);
    if (records.empty()) throw InputError("no records in '" + o.input + "'");
    const LevelGrid grid = o.grid_from.empty()
                               ? grid_from_records(records, o.grid_levels)
                               : grid_from_records(load_records(o.grid_from), o.grid_levels);
    const Method method = methods_of(o).front();
    const std::size_t m = o.m_values.empty() ? 1 : o.m_values.front();
    std::vector<FamilyEntry> entries(records.size());
    parallel_for(records.size(), [&](std::size_t i) {
        entries[i].record = records[i];
        entries[i].family = build_family(method, records[i].predicted, grid, m);
        entries[i].method = method;
        entries[i].max_holes = m;
    });
    if (o.output.empty()) {
        write_families(std::cout, entries);
    } else {
        save_families(entries, o.output);
    }
}

void run_calibrate(const Options& o) {
    const auto entries = load_families(o.input);
    std::vector<MonotoneFamily> families;
    std::vector<TreePtr> truths;
    for (const auto& e : entries) {
        families.push_back(e.family);
        truths.push_back(e.record.truth);
    }
    const double eps = o.epsilons.empty() ? 0.1 : o.epsilons.front();
    const CalibrationResult result = calibrate(families, truths, eps, o.delta);
    const std::string text = calibration_to_json(result);
    emit(json::parse(text), o.output);
}

void run_eval(const Options& o) {
    if (o.calibration.empty()) throw InputError("eval needs --calibration");
    std::ifstream in(o.calibration);
    if (!in) throw InputError("cannot open '" + o.calibration + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const CalibrationResult cal = calibration_from_json(buf.str());
    const auto entries = load_families(o.input);
    if (entries.empty()) throw InputError("no families in '" + o.input + "'");
    std::size_t errors = 0;
    double removed = 0.0;
    for (const auto& e : entries) {
        const PartialTree& p = predict(e.family, cal);
        if (!contains(p, *e.record.truth)) ++errors;
        removed += 1.0 - size_metric(p);
    }
    const auto n = static_cast<double>(entries.size());
    emit(json{{"n", entries.size()},
              {"errors", errors},
              {"coverage", 1.0 - static_cast<double>(errors) / n},
              {"removed_fraction", removed / n},
              {"chosen_level", cal.chosen_level}},
         o.output);
}

json trial_json(const TrialSummary& s) {
    return json{{"epsilon", s.epsilon},
                {"delta", s.delta},
                {"m", s.m},
                {"method", to_string(s.method)},
                {"trials", s.trials},
                {"n_cal", s.n_cal},
                {"n_test", s.n_test},
                {"passing", s.passing},
                {"passing_fraction", s.passing_fraction},
                {"threshold", s.threshold},
                {"passed", s.passed},
                {"mean_coverage", s.mean_coverage},
                {"mean_removed_fraction", s.mean_removed_fraction}};
}

void run_e2e(const Options& o) {
    const ExperimentConfig config = experiment_config(o);
    const auto records = load_records(o.input);
    if (o.pac) {
        emit(trial_json(run_pac_trials(config, records)), o.output);
        return;
    }
    const auto rows = run_experiment(config, records);
    if (!o.output.empty()) emit_tables(rows, o.output);
    for (const auto& r : rows) {
        json j{{"epsilon", r.epsilon},
               {"m", r.m},
               {"method", to_string(r.method)},
               {"coverage", r.coverage},
               {"calibration_coverage", r.calibration_coverage},
               {"removed_fraction", r.removed_fraction},
               {"errors", r.errors},
               {"n_test", r.n_test},
               {"chosen_level", r.chosen_level},
               {"fallback", r.fallback}};
        if (!r.error.empty()) j["error"] = r.error;
        std::cout << j.dump() << '\n';
    }
}

int run_fixtures(const Options& o) {
    const auto fixtures = load_fixtures(o.input);
    int mismatches = 0;
    for (const auto& f : fixtures) {
        const PartialTree p = remove_subtrees(f.record.predicted, f.remove, f.max_holes);
        const bool got_contains = contains(p, *f.record.truth);
        const std::string got_render = render(p).text();
        const bool ok = got_contains == f.expect_contains
                        && same_text_ignoring_space(got_render, f.expect_render);
        if (!ok) ++mismatches;
        std::cout << json{{"id", f.record.id},
                          {"contains", got_contains},
                          {"expect_contains", f.expect_contains},
                          {"render", got_render},
                          {"expect_render", f.expect_render},
                          {"ok", ok}}
                         .dump()
                  << '\n';
    }
    return mismatches == 0 ? 0 : 1;
}

int fail(const char* kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAC prediction sets over partial programs"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "Input file")->required();
        sub->add_option("--output", o.output, "Output file or directory (default: stdout)");
    };
    auto experiment_flags = [&](CLI::App* sub) {
        sub->add_option("--epsilon", o.epsilons, "Target error rate (repeatable)")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--delta", o.delta, "Failure probability")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--m", o.m_values, "Hole bound (repeatable)");
        sub->add_option("--grid-levels", o.grid_levels, "Number of quantile levels");
        sub->add_option("--method", o.methods, "ilp or greedy (repeatable)");
        sub->add_option("--split", o.split, "Calibration share of the records");
        sub->add_option("--trials", o.trials, "Calibration resamples for --pac");
        sub->add_option("--seed", o.seed, "Master seed");
    };

    auto* gen = app.add_subcommand("gen", "Write a synthetic record corpus");
    gen->add_option("--output", o.output, "Record file (default: stdout)");
    gen->add_option("--seed", o.seed, "Master seed");
    gen->add_option("--count", o.count, "Number of records");
    gen->add_option("--depth", o.synth.tree_depth, "Maximum tree depth");
    gen->add_option("--branching", o.synth.branching, "Maximum children per node");
    gen->add_option("--alphabet", o.synth.alphabet_size, "Label vocabulary size");
    gen->add_option("--p-leaf", o.synth.p_leaf, "Early leaf probability");
    gen->add_option("--p-corrupt", o.synth.p_corrupt, "Per-node subtree resampling probability");
    gen->add_option("--nll-correct", o.synth.nll_correct_mean, "Mean NLL of intact leaves");
    gen->add_option("--nll-wrong", o.synth.nll_wrong_mean, "Mean NLL of resampled leaves");
    gen->add_option("--noise", o.synth.noise, "NLL jitter scale");

    auto* build = app.add_subcommand("build", "Build monotone families for records");
    common(build);
    experiment_flags(build);
    build->add_option("--grid-from", o.grid_from, "Record file whose NLLs define the grid");

    auto* cal = app.add_subcommand("calibrate", "Pick the calibrated level for built families");
    common(cal);
    experiment_flags(cal);

    auto* eval = app.add_subcommand("eval", "Coverage and removed fraction at a calibrated level");
    common(eval);
    eval->add_option("--calibration", o.calibration, "Output of `calibrate`")->required();

    auto* e2e = app.add_subcommand("e2e", "Full experiment: split, build, calibrate, evaluate");
    common(e2e);
    experiment_flags(e2e);
    e2e->add_flag("--pac", o.pac, "Run repeated calibration trials instead of the sweep");
    e2e->add_option("--n-cal", o.n_cal, "Calibration records per trial");
    e2e->add_option("--n-test", o.n_test, "Test records per trial");

    auto* fixtures = app.add_subcommand("fixtures", "Check hand-encoded fixtures");
    fixtures->add_option("--input", o.input, "Fixture file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*gen) run_gen(o);
        if (*build) run_build(o);
        if (*cal) run_calibrate(o);
        if (*eval) run_eval(o);
        if (*e2e) run_e2e(o);
        if (*fixtures) return run_fixtures(o);
        return 0;
    } catch (const LoadError& e) {
        return fail("load", e.what(), 1);
    } catch (const InfeasibleError& e) {
        return fail("infeasible", e.what(), 1);
    } catch (const ConstraintError& e) {
        return fail("constraint", e.what(), 1);
    } catch (const InputError& e) {
        return fail("input", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
