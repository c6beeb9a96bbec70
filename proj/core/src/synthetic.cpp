#include "pacset/synthetic.hpp"

#include "pacset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace pacset {

namespace {

// Shape-only node; tokens and spans are filled in when the tree is written.
struct Draft {
    std::string label;
    bool wrong = false;
    std::vector<Draft> children;
};

class Generator {
public:
    Generator(const SyntheticConfig& config, std::uint64_t seed) : cfg_(config), rng_(seed) {}

    Draft sample(std::size_t depth) {
        const bool leaf = depth >= cfg_.tree_depth || (depth > 0 && coin(cfg_.p_leaf));
        std::uniform_int_distribution<std::size_t> pick_label(0, cfg_.alphabet_size - 1);
        Draft d;
        if (leaf) {
            d.label = "x" + std::to_string(pick_label(rng_));
            return d;
        }
        d.label = "f" + std::to_string(pick_label(rng_));
        std::uniform_int_distribution<std::size_t> pick_arity(1, cfg_.branching);
        const std::size_t arity = pick_arity(rng_);
        for (std::size_t i = 0; i < arity; ++i) d.children.push_back(sample(depth + 1));
        return d;
    }

    Draft corrupt(const Draft& truth, std::size_t depth) {
        if (coin(cfg_.p_corrupt)) {
            Draft fresh = sample(depth);
            mark_wrong(fresh);
            return fresh;
        }
        Draft copy{truth.label, false, {}};
        for (const auto& c : truth.children) copy.children.push_back(corrupt(c, depth + 1));
        return copy;
    }

    double leaf_nll(bool wrong) {
        const double mean = wrong ? cfg_.nll_wrong_mean : cfg_.nll_correct_mean;
        return std::max(0.0, mean + cfg_.noise * normal_(rng_));
    }

private:
    bool coin(double p) { return p > 0.0 && unit_(rng_) < p; }

    static void mark_wrong(Draft& d) {
        d.wrong = true;
        for (auto& c : d.children) mark_wrong(c);
    }

    const SyntheticConfig& cfg_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

AstNode emit(const Draft& d, std::vector<std::string>& tokens, Generator* scorer) {
    AstNode node;
    node.label = d.label;
    const std::size_t begin = tokens.size();
    tokens.push_back(d.label);
    if (d.children.empty()) {
        if (scorer) node.nll = scorer->leaf_nll(d.wrong);
    } else {
        tokens.emplace_back("(");
        for (const auto& c : d.children) node.children.push_back(emit(c, tokens, scorer));
        tokens.emplace_back(")");
    }
    node.span = {begin, tokens.size()};
    return node;
}

TreePtr materialise(const Draft& d, Generator* scorer) {
    std::vector<std::string> tokens;
    AstNode root = emit(d, tokens, scorer);
    return make_tree(std::move(tokens), root);
}

} // namespace

void SyntheticConfig::validate() const {
    auto probability = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw InputError(std::string(name) + " must lie in [0, 1]");
    };
    probability(p_corrupt, "p_corrupt");
    probability(p_leaf, "p_leaf");
    if (tree_depth == 0) throw InputError("tree_depth must be at least 1");
    if (branching == 0) throw InputError("branching must be at least 1");
    if (alphabet_size == 0) throw InputError("alphabet_size must be at least 1");
    if (!(nll_correct_mean >= 0.0) || !(nll_wrong_mean >= 0.0)) {
        throw InputError("NLL means must be non-negative");
    }
    if (!(nll_wrong_mean > nll_correct_mean)) {
        throw InputError("nll_wrong_mean must exceed nll_correct_mean");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw InputError("noise must be non-negative");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<CalibrationRecord> generate_synthetic(const SyntheticConfig& config,
                                                  std::size_t count) {
    config.validate();
    if (count == 0) throw InputError("count must be positive");
    std::vector<CalibrationRecord> records;
    records.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Generator gen(config, mix_seed(config.seed, i));
        const Draft truth = gen.sample(0);
        const Draft predicted = gen.corrupt(truth, 0);
        CalibrationRecord r;
        r.id = "syn-" + std::to_string(i);
        r.predicted = materialise(predicted, &gen);
        r.truth = materialise(truth, nullptr);
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace pacset
