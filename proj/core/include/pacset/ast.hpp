#ifndef PACSET_AST_HPP
#define PACSET_AST_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pacset {

using NodeId = std::uint32_t;

/// Half-open token range [begin, end) covered by a node.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

/// Recursive value form of an AST node, used to build and export trees.
struct AstNode {
    std::string label;
    Span span;
    std::optional<double> nll; // leaves only, in nats
    std::vector<AstNode> children;

    friend bool operator==(const AstNode&, const AstNode&) = default;
};

/// Immutable, validated AST over a token sequence.
///
/// Nodes are stored in preorder, so the subtree of `v` is the id range
/// [v, subtree_end(v)). The root is always node 0.
///
/// Construction enforces:
///  - every span is non-empty and lies inside the token sequence,
///  - child spans are contained in the parent span, pairwise disjoint and
///    ordered left to right,
///  - `nll` appears only on leaves and is finite and non-negative.
class AstTree {
public:
    AstTree(std::vector<std::string> tokens, const AstNode& root);

    std::size_t size() const noexcept { return labels_.size(); }
    static constexpr NodeId root() noexcept { return 0; }

    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    const std::string& label(NodeId v) const { return labels_.at(v); }
    Span span(NodeId v) const { return spans_.at(v); }
    std::optional<double> nll(NodeId v) const;
    std::span<const NodeId> children(NodeId v) const;
    std::optional<NodeId> parent(NodeId v) const;
    bool is_leaf(NodeId v) const { return children(v).empty(); }

    /// One past the last preorder id inside the subtree of `v`.
    NodeId subtree_end(NodeId v) const { return subtree_end_.at(v); }
    bool in_subtree(NodeId ancestor, NodeId v) const {
        return ancestor <= v && v < subtree_end_[ancestor];
    }
    std::size_t subtree_size(NodeId v) const { return subtree_end(v) - v; }
    std::size_t leaf_count(NodeId v) const { return leaf_count_.at(v); }
    /// Sum of leaf NLLs under `v` (missing NLLs count as zero).
    double subtree_nll(NodeId v) const { return subtree_nll_.at(v); }

    /// True when every leaf carries an NLL value.
    bool fully_scored() const noexcept;

    AstNode to_node(NodeId v = root()) const;

    /// Same tree with leaf NLLs replaced, one value per leaf in preorder.
    AstTree with_leaf_nlls(std::span<const double> leaf_nlls) const;

    /// Exact equality: tokens, labels, spans, NLLs and shape.
    friend bool operator==(const AstTree& a, const AstTree& b);

private:
    void flatten(const AstNode& node, std::optional<NodeId> parent,
                 std::vector<std::vector<NodeId>>& kids);
    void validate_and_index();

    std::vector<std::string> tokens_;
    std::vector<std::string> labels_;
    std::vector<Span> spans_;
    std::vector<double> nll_;     // NaN when absent
    std::vector<std::uint32_t> child_offset_;
    std::vector<NodeId> child_ids_;
    std::vector<NodeId> parent_;  // root maps to itself
    std::vector<NodeId> subtree_end_;
    std::vector<std::size_t> leaf_count_;
    std::vector<double> subtree_nll_;
};

using TreePtr = std::shared_ptr<const AstTree>;

TreePtr make_tree(std::vector<std::string> tokens, const AstNode& root);

/// Label-and-shape equality, ignoring spans, tokens and NLLs.
bool same_structure(const AstTree& a, const AstTree& b);

/// Program obtained from `source` by replacing some subtrees with holes.
///
/// Holes are stored as the sorted list of maximal removed roots. A partial
/// tree with no holes denotes exactly its source program.
class PartialTree {
public:
    PartialTree() = default;

    const AstTree& source() const { return *source_; }
    const TreePtr& source_ptr() const noexcept { return source_; }

    std::span<const NodeId> holes() const noexcept { return holes_; }
    std::size_t hole_count() const noexcept { return holes_.size(); }
    bool is_hole(NodeId v) const;
    bool is_removed(NodeId v) const { return removed_.at(v); }
    std::size_t retained_count() const noexcept { return retained_; }
    std::size_t removed_leaf_count() const noexcept { return removed_leaves_; }

private:
    friend PartialTree remove_subtrees(TreePtr, std::span<const NodeId>, std::size_t);

    TreePtr source_;
    std::vector<NodeId> holes_;
    std::vector<bool> removed_;
    std::size_t retained_ = 0;
    std::size_t removed_leaves_ = 0;
};

inline constexpr std::size_t kUnlimitedHoles = std::numeric_limits<std::size_t>::max();

/// Replaces each maximal selected subtree by a hole. Ids nested inside other
/// selected ids are dropped before counting against `max_holes`.
///
/// Throws InputError for unknown ids and ConstraintError when more than
/// `max_holes` maximal roots remain.
PartialTree remove_subtrees(TreePtr tree, std::span<const NodeId> roots,
                            std::size_t max_holes = kUnlimitedHoles);

/// Maximal elements of `roots` (those with no selected proper ancestor), sorted.
std::vector<NodeId> maximal_roots(const AstTree& tree, std::span<const NodeId> roots);

/// Sum of NLLs over leaves that are not inside a hole.
double leaf_nll_total(const AstTree& tree);
double leaf_nll_total(const PartialTree& partial);

/// Membership of `target` in the completion set of `partial`.
///
/// Non-hole nodes match by label with their children aligned left to right;
/// each hole absorbs a contiguous, possibly empty, run of sibling subtrees.
bool contains(const PartialTree& partial, const AstTree& target);

/// Fraction of source nodes retained: 1 when there are no holes.
double size_metric(const PartialTree& partial);

struct TokenRendering {
    std::vector<std::string> tokens;

    /// Tokens joined by single spaces.
    std::string text() const;
};

inline constexpr std::string_view kHoleToken = "??";

/// Source tokens with the span of every hole collapsed into one "??".
TokenRendering render(const PartialTree& partial);

} // namespace pacset

#endif // PACSET_AST_HPP
