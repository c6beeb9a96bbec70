#ifndef PACSET_SYNTHETIC_HPP
#define PACSET_SYNTHETIC_HPP

#include "pacset/calibrate.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pacset {

/// Knobs for the synthetic (prediction, truth) generator.
struct SyntheticConfig {
    std::uint64_t seed = 0;
    std::size_t tree_depth = 4;    // root has depth 0
    std::size_t branching = 3;     // max children of an internal node
    std::size_t alphabet_size = 4; // distinct leaf and internal labels
    double p_leaf = 0.3;           // chance a non-root node above max depth is a leaf
    double p_corrupt = 0.028;      // per-node chance its subtree is resampled
    double nll_correct_mean = 0.2;
    double nll_wrong_mean = 2.0;
    double noise = 0.3;

    /// Throws InputError when a field is out of range.
    void validate() const;
};

/// Deterministic in (config, count). Record i uses a seed derived from
/// config.seed and i alone, so prefixes agree across counts.
///
/// Trees are written s-expression style: a leaf is one token, an internal
/// node is `label ( child ... )`. Leaves are `x<k>`, internal nodes `f<k>`.
std::vector<CalibrationRecord> generate_synthetic(const SyntheticConfig& config,
                                                  std::size_t count);

/// splitmix64 finaliser, used to derive per-record and per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace pacset

#endif // PACSET_SYNTHETIC_HPP
