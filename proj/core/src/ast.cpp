#include "pacset/ast.hpp"

#include "pacset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pacset {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

std::string node_context(const AstTree& tree, NodeId v) {
    return "node " + std::to_string(v) + " ('" + tree.label(v) + "')";
}

} // namespace

AstTree::AstTree(std::vector<std::string> tokens, const AstNode& root)
    : tokens_(std::move(tokens)) {
    std::vector<std::vector<NodeId>> kids;
    flatten(root, std::nullopt, kids);

    const std::size_t n = labels_.size();
    child_offset_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        child_offset_[v] = static_cast<std::uint32_t>(child_ids_.size());
        child_ids_.insert(child_ids_.end(), kids[v].begin(), kids[v].end());
    }
    child_offset_[n] = static_cast<std::uint32_t>(child_ids_.size());
    validate_and_index();
}

void AstTree::flatten(const AstNode& node, std::optional<NodeId> parent,
                      std::vector<std::vector<NodeId>>& kids) {
    const auto id = static_cast<NodeId>(labels_.size());
    labels_.push_back(node.label);
    spans_.push_back(node.span);
    nll_.push_back(node.nll ? *node.nll : kAbsent);
    parent_.push_back(parent ? *parent : id);
    subtree_end_.push_back(0);
    kids.emplace_back();
    if (node.label.empty()) {
        throw InputError("node " + std::to_string(id) + " has an empty label");
    }
    if (node.nll && !node.children.empty()) {
        throw InputError(node_context(*this, id) + " is internal but carries an nll");
    }
    if (node.nll && (!std::isfinite(*node.nll) || *node.nll < 0.0)) {
        throw InputError(node_context(*this, id) + " has a negative or non-finite nll");
    }
    for (const auto& child : node.children) {
        kids[id].push_back(static_cast<NodeId>(labels_.size()));
        flatten(child, id, kids);
    }
    subtree_end_[id] = static_cast<NodeId>(labels_.size());
}

void AstTree::validate_and_index() {
    const std::size_t n = labels_.size();
    for (NodeId v = 0; v < n; ++v) {
        const Span s = spans_[v];
        if (s.begin >= s.end) {
            throw InputError(node_context(*this, v) + " has an empty span");
        }
        if (s.end > tokens_.size()) {
            throw InputError(node_context(*this, v) + " span exceeds the token sequence");
        }
        std::size_t cursor = s.begin;
        for (NodeId c : children(v)) {
            const Span cs = spans_[c];
            if (cs.begin < s.begin || cs.end > s.end) {
                throw InputError(node_context(*this, c) + " span escapes its parent");
            }
            if (cs.begin < cursor) {
                throw InputError(node_context(*this, c)
                                 + " span overlaps or precedes an earlier sibling");
            }
            cursor = cs.end;
        }
    }

    leaf_count_.assign(n, 0);
    subtree_nll_.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const auto v = static_cast<NodeId>(i);
        if (is_leaf(v)) {
            leaf_count_[v] = 1;
            subtree_nll_[v] = std::isnan(nll_[v]) ? 0.0 : nll_[v];
        } else {
            for (NodeId c : children(v)) {
                leaf_count_[v] += leaf_count_[c];
                subtree_nll_[v] += subtree_nll_[c];
            }
        }
    }
}

std::optional<double> AstTree::nll(NodeId v) const {
    const double x = nll_.at(v);
    if (std::isnan(x)) return std::nullopt;
    return x;
}

std::span<const NodeId> AstTree::children(NodeId v) const {
    const auto begin = child_offset_.at(v);
    const auto end = child_offset_.at(v + 1);
    return {child_ids_.data() + begin, child_ids_.data() + end};
}

std::optional<NodeId> AstTree::parent(NodeId v) const {
    if (v == root()) return std::nullopt;
    return parent_.at(v);
}

bool AstTree::fully_scored() const noexcept {
    for (NodeId v = 0; v < size(); ++v) {
        if (is_leaf(v) && std::isnan(nll_[v])) return false;
    }
    return true;
}

AstNode AstTree::to_node(NodeId v) const {
    AstNode node{label(v), span(v), nll(v), {}};
    for (NodeId c : children(v)) node.children.push_back(to_node(c));
    return node;
}

AstTree AstTree::with_leaf_nlls(std::span<const double> leaf_nlls) const {
    if (leaf_nlls.size() != leaf_count(root())) {
        throw InputError("expected " + std::to_string(leaf_count(root())) + " leaf nlls, got "
                         + std::to_string(leaf_nlls.size()));
    }
    AstNode node = to_node();
    std::size_t next = 0;
    std::function<void(AstNode&)> assign = [&](AstNode& n) {
        if (n.children.empty()) {
            n.nll = leaf_nlls[next++];
            return;
        }
        for (auto& c : n.children) assign(c);
    };
    assign(node);
    return AstTree(tokens_, node);
}

bool operator==(const AstTree& a, const AstTree& b) {
    if (a.tokens_ != b.tokens_ || a.labels_ != b.labels_ || a.spans_ != b.spans_
        || a.child_ids_ != b.child_ids_ || a.child_offset_ != b.child_offset_) {
        return false;
    }
    for (std::size_t i = 0; i < a.nll_.size(); ++i) {
        const bool na = std::isnan(a.nll_[i]);
        const bool nb = std::isnan(b.nll_[i]);
        if (na != nb || (!na && a.nll_[i] != b.nll_[i])) return false;
    }
    return true;
}

TreePtr make_tree(std::vector<std::string> tokens, const AstNode& root) {
    return std::make_shared<const AstTree>(std::move(tokens), root);
}

bool same_structure(const AstTree& a, const AstTree& b) {
    if (a.size() != b.size()) return false;
    for (NodeId v = 0; v < a.size(); ++v) {
        if (a.label(v) != b.label(v)) return false;
        const auto ca = a.children(v);
        const auto cb = b.children(v);
        if (!std::equal(ca.begin(), ca.end(), cb.begin(), cb.end())) return false;
    }
    return true;
}

// --- PartialTree -----------------------------------------------------------

bool PartialTree::is_hole(NodeId v) const {
    return std::binary_search(holes_.begin(), holes_.end(), v);
}

std::vector<NodeId> maximal_roots(const AstTree& tree, std::span<const NodeId> roots) {
    std::vector<NodeId> sorted(roots.begin(), roots.end());
    for (NodeId r : sorted) {
        if (r >= tree.size()) {
            throw InputError("unknown node id " + std::to_string(r));
        }
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    // In preorder a nested id always follows its ancestor, so one pass suffices.
    std::vector<NodeId> maximal;
    for (NodeId r : sorted) {
        if (!maximal.empty() && tree.in_subtree(maximal.back(), r)) continue;
        maximal.push_back(r);
    }
    return maximal;
}

PartialTree remove_subtrees(TreePtr tree, std::span<const NodeId> roots, std::size_t max_holes) {
    if (!tree) throw InputError("remove_subtrees: null tree");
    PartialTree partial;
    partial.holes_ = maximal_roots(*tree, roots);
    if (partial.holes_.size() > max_holes) {
        throw ConstraintError("removal uses " + std::to_string(partial.holes_.size())
                              + " holes but at most " + std::to_string(max_holes)
                              + " are allowed");
    }
    partial.removed_.assign(tree->size(), false);
    std::size_t removed = 0;
    for (NodeId r : partial.holes_) {
        for (NodeId v = r; v < tree->subtree_end(r); ++v) partial.removed_[v] = true;
        removed += tree->subtree_size(r);
        partial.removed_leaves_ += tree->leaf_count(r);
    }
    partial.retained_ = tree->size() - removed;
    partial.source_ = std::move(tree);
    return partial;
}

double leaf_nll_total(const AstTree& tree) {
    double total = 0.0;
    for (NodeId v = 0; v < tree.size(); ++v) {
        if (tree.is_leaf(v)) total += tree.nll(v).value_or(0.0);
    }
    return total;
}

double leaf_nll_total(const PartialTree& partial) {
    const AstTree& tree = partial.source();
    double total = 0.0;
    for (NodeId v = 0; v < tree.size(); ++v) {
        if (tree.is_leaf(v) && !partial.is_removed(v)) total += tree.nll(v).value_or(0.0);
    }
    return total;
}

// --- membership ------------------------------------------------------------

namespace {

class Matcher {
public:
    Matcher(const PartialTree& partial, const AstTree& target)
        : partial_(partial)
        , source_(partial.source())
        , target_(target)
        , memo_(source_.size() * target.size(), kUnknown) {}

    bool nodes(NodeId p, NodeId t) {
        auto& slot = memo_[static_cast<std::size_t>(p) * target_.size() + t];
        if (slot != kUnknown) return slot == kYes;
        const bool ok = source_.label(p) == target_.label(t)
                        && siblings(source_.children(p), target_.children(t));
        slot = ok ? kYes : kNo;
        return ok;
    }

private:
    // Wildcard alignment of a partial child list against a target child list.
    bool siblings(std::span<const NodeId> pattern, std::span<const NodeId> subject) {
        const std::size_t np = pattern.size();
        const std::size_t ns = subject.size();
        // reach[i][j]: pattern[i..] can match subject[j..].
        std::vector<char> reach((np + 1) * (ns + 1), 0);
        auto at = [&](std::size_t i, std::size_t j) -> char& { return reach[i * (ns + 1) + j]; };
        at(np, ns) = 1;
        for (std::size_t i = np; i-- > 0;) {
            const bool hole = partial_.is_removed(pattern[i]);
            for (std::size_t j = ns + 1; j-- > 0;) {
                bool ok = false;
                if (hole) {
                    ok = at(i + 1, j) || (j < ns && at(i, j + 1));
                } else if (j < ns) {
                    ok = at(i + 1, j + 1) && nodes(pattern[i], subject[j]);
                }
                at(i, j) = ok ? 1 : 0;
            }
        }
        return at(0, 0) != 0;
    }

    static constexpr signed char kUnknown = -1;
    static constexpr signed char kNo = 0;
    static constexpr signed char kYes = 1;

    const PartialTree& partial_;
    const AstTree& source_;
    const AstTree& target_;
    std::vector<signed char> memo_;
};

} // namespace

bool contains(const PartialTree& partial, const AstTree& target) {
    if (partial.is_removed(AstTree::root())) return true;
    Matcher matcher(partial, target);
    return matcher.nodes(AstTree::root(), AstTree::root());
}

double size_metric(const PartialTree& partial) {
    return static_cast<double>(partial.retained_count())
           / static_cast<double>(partial.source().size());
}

std::string TokenRendering::text() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

TokenRendering render(const PartialTree& partial) {
    const AstTree& tree = partial.source();
    const auto& tokens = tree.tokens();
    TokenRendering out;
    std::size_t cursor = 0;
    // Holes are disjoint and sorted by preorder id, hence by span start.
    for (NodeId h : partial.holes()) {
        const Span s = tree.span(h);
        out.tokens.insert(out.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(cursor),
                          tokens.begin() + static_cast<std::ptrdiff_t>(s.begin));
        out.tokens.emplace_back(kHoleToken);
        cursor = s.end;
    }
    out.tokens.insert(out.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(cursor),
                      tokens.end());
    return out;
}

} // namespace pacset
