#pragma once

#include <optional>
#include <string>
#include <vector>

#include "astsum/errors.hpp"

namespace astsum {

/// One node of a rooted ordered tree. node_id values are preorder positions.
struct AstNode {
    int node_id = 0;
    std::string label;
    std::optional<std::string> value;  // identifier/literal payload, if any
    std::optional<int> parent;
    std::vector<int> children;
};

struct Ast {
    std::vector<AstNode> nodes;
    int size() const { return static_cast<int>(nodes.size()); }
};

/// Token a node contributes downstream: its value when present, else its label.
inline const std::string& render_token(const AstNode& node) {
    return node.value ? *node.value : node.label;
}

struct Diagnostic {
    int node_id;
    std::string message;
};

/// Empty result iff every Ast invariant holds: ids 0..N-1 in preorder,
/// consistent parent/child links, single root, acyclic, all reachable.
std::vector<Diagnostic> validate_ast(const Ast& ast);

/// Rebuilds the tree so ids are the preorder positions. Child order is kept.
/// Throws StructureError when the input is not a tree (cycle, multiple roots,
/// orphan node, dangling child reference).
Ast renumber_preorder(const Ast& ast);

/// Structural equality: same shape, labels, values, child order.
bool structurally_equal(const Ast& a, const Ast& b);

/// Reads the AST JSON format. Accepts the canonical nested document
/// {"label": ..., "value": ...|null, "children": [...]} or a flat variant
/// {"nodes": [{"label", "value", "children": [indices]}]}. Ids are
/// renumbered to preorder; the result passes validate_ast.
Ast ast_from_json(const std::string& document);

/// Canonical nested serialization: keys label, value, children; 2-space
/// indent. Deterministic, so structural equality implies byte equality.
std::string ast_to_json(const Ast& ast);

}  // namespace astsum
