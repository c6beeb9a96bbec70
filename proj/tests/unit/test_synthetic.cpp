#include "pacset/errors.hpp"
#include "pacset/synthetic.hpp"

#include <gtest/gtest.h>

using namespace pacset;

namespace {

double level_one_coverage(const SyntheticConfig& cfg, std::size_t count) {
    std::size_t same = 0;
    for (const auto& r : generate_synthetic(cfg, count)) same += same_structure(*r.predicted, *r.truth);
    return static_cast<double>(same) / static_cast<double>(count);
}

} // namespace

TEST(Synthetic, NoCorruptionKeepsTruth) {
    SyntheticConfig cfg;
    cfg.p_corrupt = 0.0;
    for (const auto& r : generate_synthetic(cfg, 200)) {
        ASSERT_TRUE(same_structure(*r.predicted, *r.truth)) << r.id;
        ASSERT_TRUE(r.predicted->fully_scored());
        ASSERT_EQ(r.predicted->tokens(), r.truth->tokens());
    }
}

TEST(Synthetic, DeterministicAndPrefixStable) {
    SyntheticConfig cfg;
    cfg.seed = 99;
    const auto a = generate_synthetic(cfg, 50);
    const auto b = generate_synthetic(cfg, 80);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].id, b[i].id);
        ASSERT_TRUE(*a[i].predicted == *b[i].predicted);
        ASSERT_TRUE(*a[i].truth == *b[i].truth);
    }
    cfg.seed = 100;
    const auto c = generate_synthetic(cfg, 50);
    std::size_t differ = 0;
    for (std::size_t i = 0; i < a.size(); ++i) differ += !(*a[i].predicted == *c[i].predicted);
    EXPECT_GT(differ, 40u);
}

TEST(Synthetic, RespectsShapeLimits) {
    SyntheticConfig cfg;
    cfg.tree_depth = 3;
    cfg.branching = 2;
    cfg.p_corrupt = 0.2;
    for (const auto& r : generate_synthetic(cfg, 300)) {
        for (const auto* t : {r.predicted.get(), r.truth.get()}) {
            for (NodeId v = 0; v < t->size(); ++v) {
                ASSERT_LE(t->children(v).size(), 2u);
                std::size_t depth = 0;
                for (auto p = t->parent(v); p; p = t->parent(*p)) ++depth;
                ASSERT_LE(depth, 3u);
            }
        }
    }
}

TEST(Synthetic, CoverageFallsWithCorruption) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        double prev = 1.1;
        for (double p : {0.0, 0.02, 0.05, 0.1, 0.2}) {
            SyntheticConfig cfg;
            cfg.seed = seed;
            cfg.p_corrupt = p;
            const double cov = level_one_coverage(cfg, 400);
            EXPECT_LT(cov, prev) << "seed " << seed << " p " << p;
            prev = cov;
        }
    }
}

TEST(Synthetic, WrongLeavesScoreHigher) {
    SyntheticConfig cfg;
    cfg.p_corrupt = 0.0;
    double clean = 0.0;
    std::size_t leaves = 0;
    for (const auto& r : generate_synthetic(cfg, 200)) {
        clean += leaf_nll_total(*r.predicted);
        leaves += r.predicted->leaf_count(0);
    }
    // Clamping at zero lifts the clean mean a little above its nominal value.
    EXPECT_GT(clean / static_cast<double>(leaves), cfg.nll_correct_mean);
    EXPECT_LT(clean / static_cast<double>(leaves), 0.3);
    cfg.p_corrupt = 1.0;
    double wrong = 0.0;
    leaves = 0;
    for (const auto& r : generate_synthetic(cfg, 200)) {
        wrong += leaf_nll_total(*r.predicted);
        leaves += r.predicted->leaf_count(0);
    }
    EXPECT_NEAR(wrong / static_cast<double>(leaves), cfg.nll_wrong_mean, 0.05);
}

TEST(Synthetic, ValidatesConfig) {
    auto rejects = [](auto mutate) {
        SyntheticConfig cfg;
        mutate(cfg);
        EXPECT_THROW(cfg.validate(), InputError);
    };
    rejects([](SyntheticConfig& c) { c.p_corrupt = 1.5; });
    rejects([](SyntheticConfig& c) { c.p_leaf = -0.1; });
    rejects([](SyntheticConfig& c) { c.tree_depth = 0; });
    rejects([](SyntheticConfig& c) { c.branching = 0; });
    rejects([](SyntheticConfig& c) { c.alphabet_size = 0; });
    rejects([](SyntheticConfig& c) { c.nll_wrong_mean = 0.1; });
    rejects([](SyntheticConfig& c) { c.noise = -1.0; });
    EXPECT_THROW(generate_synthetic(SyntheticConfig{}, 0), InputError);
}
