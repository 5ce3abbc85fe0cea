#include "astsum/relations.hpp"

#include <algorithm>
#include <string>

#include "astsum/errors.hpp"
#include "astsum/kernels.hpp"

namespace astsum {

namespace {

void require_pot(const LinearSeq& seq, const Ast& ast, const char* op) {
    if (seq.kind != Traversal::Pot) {
        throw KindMismatchError(std::string(op) + " needs a POT sequence, got SBT");
    }
    if (seq.n() != ast.size()) {
        throw KindMismatchError(std::string(op) + ": sequence length " + std::to_string(seq.n()) +
                                " does not match tree size " + std::to_string(ast.size()));
    }
}

}  // namespace

IntMatrix ancestor_matrix(const Ast& ast, const LinearSeq& seq) {
    require_pot(seq, ast, "ancestor_matrix");
    const int n = ast.size();
    IntMatrix a(n, n, kNoRelation);
    // Walk each node's root path once; that touches every ancestor pair
    // exactly once per direction.
    for (int i = 0; i < n; ++i) {
        a.at(i, i) = 0;
        int k = 0;
        int cur = i;
        while (ast.nodes[cur].parent.has_value()) {
            cur = *ast.nodes[cur].parent;
            ++k;
            a.at(i, cur) = k;   // cur is an ancestor of i
            a.at(cur, i) = -k;  // i is a descendant of cur
        }
    }
    return a;
}

IntMatrix sibling_matrix(const Ast& ast, const LinearSeq& seq) {
    require_pot(seq, ast, "sibling_matrix");
    const int n = ast.size();
    IntMatrix s(n, n, kNoRelation);
    for (int i = 0; i < n; ++i) s.at(i, i) = 0;
    for (const AstNode& parent : ast.nodes) {
        const auto& kids = parent.children;
        for (size_t p = 0; p < kids.size(); ++p) {
            for (size_t q = 0; q < kids.size(); ++q) {
                s.at(kids[p], kids[q]) = static_cast<int>(q) - static_cast<int>(p);
            }
        }
    }
    return s;
}

const char* relation_name(Relation r) {
    return r == Relation::Ancestor ? "ancestor" : "sibling";
}

std::vector<AttentionPattern> build_head_masks(const IntMatrix& a, const IntMatrix& s,
                                               const ModelConfig& config) {
    if (config.heads < 1 || config.heads % 2 != 0) {
        throw ConfigError("head masks need a positive even head count, got " + std::to_string(config.heads));
    }
    if (config.delta_anc < 1 || config.delta_sib < 1) {
        throw ConfigError("distance thresholds must be >= 1");
    }
    if (a.rows != a.cols || s.rows != s.cols || a.rows != s.rows) {
        throw ShapeError("relation matrices must be square and equally sized");
    }
    const int n = a.rows;
    const int h = config.heads;

    std::vector<AttentionPattern> patterns(h);
    for (int head = 0; head < h; ++head) {
        AttentionPattern& pat = patterns[head];
        pat.head = head;
        pat.relation = head < h / 2 ? Relation::Ancestor : Relation::Sibling;
        pat.delta = pat.relation == Relation::Ancestor ? config.delta_anc : config.delta_sib;
        const IntMatrix& dist = pat.relation == Relation::Ancestor ? a : s;
        const int delta = pat.delta;
        pat.allow = BoolMatrix(n, n, false);
        pat.bias_index = IntMatrix(n, n, pat.pad_index());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    pat.allow.set(i, j, true);
                    pat.bias_index.at(i, j) = pat.self_index();
                    continue;
                }
                const int d = dist.at(i, j);
                if (d == kNoRelation || d < -delta || d > delta) continue;
                pat.allow.set(i, j, true);
                pat.bias_index.at(i, j) = d + delta;
            }
        }
    }
    return patterns;
}

SparsityReport sparsity_report(const std::vector<AttentionPattern>& patterns) {
    if (patterns.empty()) throw EmptyInputError("sparsity_report needs at least one pattern");
    SparsityReport report;
    long long denom = 0;
    for (const AttentionPattern& pat : patterns) {
        HeadSparsity hs;
        hs.head = pat.head;
        hs.relation = pat.relation;
        for (uint8_t b : pat.allow.data) hs.allowed += b != 0;
        report.per_head.push_back(hs);
        report.total += hs.allowed;
        denom += static_cast<long long>(pat.allow.rows) * pat.allow.cols;
    }
    report.ratio = denom > 0 ? static_cast<double>(report.total) / static_cast<double>(denom) : 0.0;
    return report;
}

Ast make_perfect_binary_tree(int depth) {
    if (depth < 1) throw StructureError("perfect binary tree needs depth >= 1");
    Ast ast;
    // Preorder construction: each call appends its own node before its subtrees.
    struct Frame {
        int parent;
        int levels;
    };
    std::vector<Frame> stack{{-1, depth}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        AstNode node;
        node.node_id = ast.size();
        if (f.levels == 1) {
            node.label = "Num";
            node.value = std::to_string(node.node_id);
        } else {
            node.label = "BinOp";
            node.value = "+";
        }
        const int id = node.node_id;
        if (f.parent >= 0) {
            node.parent = f.parent;
            ast.nodes[f.parent].children.push_back(id);
        }
        ast.nodes.push_back(std::move(node));
        if (f.levels > 1) {
            // Two child frames; the one popped first becomes the left
            // subtree, so ids come out in preorder.
            stack.push_back({id, f.levels - 1});
            stack.push_back({id, f.levels - 1});
        }
    }
    return ast;
}

std::vector<SparsityRow> sparsity_growth(int min_depth, int max_depth) {
    if (min_depth < 1 || max_depth < min_depth) {
        throw ConfigError("sparsity_growth needs 1 <= min_depth <= max_depth");
    }
    std::vector<SparsityRow> rows;
    for (int depth = min_depth; depth <= max_depth; ++depth) {
        Ast tree = make_perfect_binary_tree(depth);
        LinearSeq seq = preorder(tree);
        IntMatrix a = ancestor_matrix(tree, seq);
        IntMatrix s = sibling_matrix(tree, seq);
        ModelConfig cfg;
        cfg.heads = 2;
        // Thresholds beyond any distance the tree can produce, so the counts
        // reflect the relations themselves.
        cfg.delta_anc = 2 * depth;
        cfg.delta_sib = 2 * depth;
        SparsityReport rep = sparsity_report(build_head_masks(a, s, cfg));
        SparsityRow row;
        row.depth = depth;
        row.n = tree.size();
        row.ancestor_allowed = rep.per_head[0].allowed;
        row.sibling_allowed = rep.per_head[1].allowed;
        const double n2 = static_cast<double>(row.n) * row.n;
        row.ancestor_ratio = row.ancestor_allowed / n2;
        row.sibling_ratio = row.sibling_allowed / n2;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace astsum
