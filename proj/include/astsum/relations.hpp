#pragma once

#include <limits>
#include <vector>

#include "astsum/ast.hpp"
#include "astsum/config.hpp"
#include "astsum/linearize.hpp"
#include "astsum/tensor.hpp"

namespace astsum {

// Sentinel for "no relation between this node pair".
inline constexpr int kNoRelation = std::numeric_limits<int>::min();

// A[i][j] = +k when j is an ancestor of i at k edges, -k when j is a
// descendant at k edges, kNoRelation otherwise. Diagonal is 0.
IntMatrix ancestor_matrix(const Ast& ast, const LinearSeq& seq);

// S[i][j] = position(j) - position(i) among the ordered children of a shared
// parent, kNoRelation when the parents differ. Diagonal is 0.
IntMatrix sibling_matrix(const Ast& ast, const LinearSeq& seq);

enum class Relation { Ancestor, Sibling };

const char* relation_name(Relation r);  // "ancestor" / "sibling"

// Per-head attention recipe. bias_index values: d + delta for an allowed
// off-diagonal pair at signed distance d, 2*delta+1 for self, 2*delta+2 for
// disallowed/padding slots. A bias table for this head therefore has
// 2*delta+2 learned entries (index 2*delta+2 is never looked up).
struct AttentionPattern {
    int head = 0;
    Relation relation = Relation::Ancestor;
    int delta = 1;
    BoolMatrix allow;
    IntMatrix bias_index;

    int self_index() const { return 2 * delta + 1; }
    int pad_index() const { return 2 * delta + 2; }
    int table_size() const { return 2 * delta + 2; }
};

// Heads 0..H/2-1 mask by ancestor distance (threshold delta_anc), heads
// H/2..H-1 by sibling offset (delta_sib). Diagonal always allowed.
std::vector<AttentionPattern> build_head_masks(const IntMatrix& a, const IntMatrix& s,
                                               const ModelConfig& config);

struct HeadSparsity {
    int head = 0;
    Relation relation = Relation::Ancestor;
    long long allowed = 0;
};

struct SparsityReport {
    std::vector<HeadSparsity> per_head;
    long long total = 0;
    double ratio = 0.0;  // total / (H * n^2)
};

SparsityReport sparsity_report(const std::vector<AttentionPattern>& patterns);

// Perfect binary tree of the given depth (depth 1 = single node), preorder ids.
Ast make_perfect_binary_tree(int depth);

// One row of the mask-sparsity growth table produced by `bench`.
struct SparsityRow {
    int depth = 0;
    int n = 0;
    long long ancestor_allowed = 0;
    long long sibling_allowed = 0;
    double ancestor_ratio = 0.0;  // ancestor_allowed / n^2
    double sibling_ratio = 0.0;
};

// Unbounded-threshold masks over perfect binary trees, one row per depth.
std::vector<SparsityRow> sparsity_growth(int min_depth, int max_depth);

}  // namespace astsum
