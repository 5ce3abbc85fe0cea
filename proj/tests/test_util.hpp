#pragma once

#include <random>
#include <string>
#include <vector>

#include "astsum/ast.hpp"

namespace astsum::testutil {

// Random rooted ordered tree with n nodes, preorder ids. Each node after the
// root attaches to a uniformly chosen earlier node, then ids are canonicalized.
inline Ast random_tree(std::mt19937_64& rng, int n) {
    static const std::vector<std::string> labels = {"BinOp", "Call", "Block", "If", "Return"};
    static const std::vector<std::string> leaf_values = {"x", "y", "1", "2", "foo"};

    Ast ast;
    ast.nodes.resize(n);
    for (int i = 0; i < n; ++i) {
        AstNode& node = ast.nodes[i];
        node.node_id = i;
        node.label = labels[rng() % labels.size()];
        if (rng() % 2 == 0) node.value = leaf_values[rng() % leaf_values.size()];
        if (i > 0) {
            const int parent = static_cast<int>(rng() % i);
            node.parent = parent;
            ast.nodes[parent].children.push_back(i);
        }
    }
    return renumber_preorder(ast);
}

}  // namespace astsum::testutil
