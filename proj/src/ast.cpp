#include "astsum/ast.hpp"

#include <algorithm>

#include <json.hpp>

namespace astsum {

namespace {

// Preorder walk over children links starting at root; returns visit order.
// Sets *revisit when a node is reached twice, i.e. the children links loop.
std::vector<int> preorder_order(const Ast& ast, int root, bool* revisit) {
    std::vector<int> order;
    std::vector<uint8_t> seen(ast.nodes.size(), 0);
    std::vector<int> stack{root};
    *revisit = false;
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (id < 0 || id >= ast.size()) continue;
        if (seen[id]) {
            *revisit = true;
            return order;
        }
        seen[id] = 1;
        order.push_back(id);
        const auto& ch = ast.nodes[id].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return order;
}

}  // namespace

std::vector<Diagnostic> validate_ast(const Ast& ast) {
    std::vector<Diagnostic> diags;
    const int n = ast.size();
    if (n == 0) {
        diags.push_back({0, "tree is empty"});
        return diags;
    }

    for (int i = 0; i < n; ++i) {
        if (ast.nodes[i].node_id != i)
            diags.push_back({i, "node_id does not match its index"});
    }

    std::vector<int> roots;
    for (int i = 0; i < n; ++i)
        if (!ast.nodes[i].parent) roots.push_back(i);
    if (roots.size() != 1)
        diags.push_back({roots.empty() ? 0 : roots[1], "expected exactly one root"});
    else if (roots[0] != 0)
        diags.push_back({roots[0], "root must have id 0"});

    bool links_ok = true;
    for (int i = 0; i < n; ++i) {
        for (int c : ast.nodes[i].children) {
            if (c < 0 || c >= n) {
                diags.push_back({i, "child id out of range"});
                links_ok = false;
                continue;
            }
            if (!ast.nodes[c].parent || *ast.nodes[c].parent != i) {
                diags.push_back({i, "child " + std::to_string(c) + " does not point back to this parent"});
                links_ok = false;
            }
        }
        if (ast.nodes[i].parent) {
            int p = *ast.nodes[i].parent;
            if (p < 0 || p >= n) {
                diags.push_back({i, "parent id out of range"});
                links_ok = false;
            } else {
                const auto& pc = ast.nodes[p].children;
                if (std::find(pc.begin(), pc.end(), i) == pc.end()) {
                    diags.push_back({i, "parent does not list this node as a child"});
                    links_ok = false;
                }
            }
        }
    }

    if (links_ok && roots.size() == 1) {
        bool revisit = false;
        auto order = preorder_order(ast, roots[0], &revisit);
        if (revisit) {
            diags.push_back({order.empty() ? roots[0] : order.back(), "cycle reachable from root"});
        } else if (static_cast<int>(order.size()) != n) {
            std::vector<uint8_t> seen(n, 0);
            for (int id : order) seen[id] = 1;
            for (int i = 0; i < n; ++i)
                if (!seen[i]) {
                    diags.push_back({i, "orphan node not reachable from root"});
                    break;
                }
        } else {
            for (int pos = 0; pos < n; ++pos) {
                if (order[pos] != pos) {
                    diags.push_back({order[pos], "ids not in preorder; first out-of-order id is " +
                                                     std::to_string(order[pos])});
                    break;
                }
            }
        }
    }
    return diags;
}

Ast renumber_preorder(const Ast& ast) {
    const int n = ast.size();
    if (n == 0) throw StructureError("empty tree");

    std::vector<int> roots;
    for (int i = 0; i < n; ++i)
        if (!ast.nodes[i].parent) roots.push_back(i);
    if (roots.empty()) throw StructureError("no root node (cycle through every node)");
    if (roots.size() > 1) throw StructureError("multiple roots");

    for (const auto& node : ast.nodes)
        for (int c : node.children)
            if (c < 0 || c >= n) throw StructureError("child id out of range");

    bool revisit = false;
    auto order = preorder_order(ast, roots[0], &revisit);
    if (revisit) throw StructureError("cycle in children links");
    if (static_cast<int>(order.size()) != n) throw StructureError("orphan node not reachable from root");

    std::vector<int> old_to_new(n);
    for (int pos = 0; pos < n; ++pos) old_to_new[order[pos]] = pos;

    Ast out;
    out.nodes.resize(n);
    for (int pos = 0; pos < n; ++pos) {
        const AstNode& src = ast.nodes[order[pos]];
        AstNode& dst = out.nodes[pos];
        dst.node_id = pos;
        dst.label = src.label;
        dst.value = src.value;
        dst.parent = src.parent ? std::optional<int>(old_to_new[*src.parent]) : std::nullopt;
        dst.children.clear();
        dst.children.reserve(src.children.size());
        for (int c : src.children) dst.children.push_back(old_to_new[c]);
    }
    return out;
}

bool structurally_equal(const Ast& a, const Ast& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i) {
        const AstNode& x = a.nodes[i];
        const AstNode& y = b.nodes[i];
        if (x.label != y.label || x.value != y.value || x.parent != y.parent ||
            x.children != y.children)
            return false;
    }
    return true;
}

namespace {

using json = nlohmann::ordered_json;

// Nested-form reader; assigns ids in discovery order, which is preorder.
void read_nested(const json& obj, std::optional<int> parent, Ast& out) {
    if (!obj.is_object()) throw SchemaError("AST node must be a JSON object");
    if (!obj.contains("label")) throw SchemaError("AST node missing \"label\"");
    if (!obj["label"].is_string()) throw SchemaError("\"label\" must be a string");
    if (!obj.contains("value")) throw SchemaError("AST node missing \"value\"");
    if (!obj["value"].is_string() && !obj["value"].is_null())
        throw SchemaError("\"value\" must be a string or null");
    if (!obj.contains("children")) throw SchemaError("AST node missing \"children\"");
    if (!obj["children"].is_array()) throw SchemaError("\"children\" must be an array");

    int id = out.size();
    AstNode node;
    node.node_id = id;
    node.label = obj["label"].get<std::string>();
    if (obj["value"].is_string()) node.value = obj["value"].get<std::string>();
    node.parent = parent;
    out.nodes.push_back(std::move(node));
    if (parent) out.nodes[*parent].children.push_back(id);
    for (const auto& child : obj["children"]) read_nested(child, id, out);
}

Ast read_flat(const json& doc) {
    const auto& arr = doc["nodes"];
    if (!arr.is_array() || arr.empty()) throw SchemaError("\"nodes\" must be a nonempty array");
    Ast raw;
    raw.nodes.resize(arr.size());
    const int n = static_cast<int>(arr.size());
    for (int i = 0; i < n; ++i) {
        const auto& obj = arr[i];
        if (!obj.is_object()) throw SchemaError("AST node must be a JSON object");
        if (!obj.contains("label") || !obj["label"].is_string())
            throw SchemaError("AST node missing string \"label\"");
        AstNode& node = raw.nodes[i];
        node.node_id = i;
        node.label = obj["label"].get<std::string>();
        if (obj.contains("value") && obj["value"].is_string())
            node.value = obj["value"].get<std::string>();
        if (obj.contains("children")) {
            if (!obj["children"].is_array()) throw SchemaError("\"children\" must be an array");
            for (const auto& c : obj["children"]) {
                if (!c.is_number_integer()) throw SchemaError("flat children must be integer indices");
                node.children.push_back(c.get<int>());
            }
        }
    }
    // Derive parents from the children lists; conflicts are structural.
    for (int i = 0; i < n; ++i) {
        for (int c : raw.nodes[i].children) {
            if (c < 0 || c >= n) throw StructureError("child index out of range");
            if (c == i) throw StructureError("node " + std::to_string(i) + " lists itself as a child (cycle)");
            if (raw.nodes[c].parent) throw StructureError("node " + std::to_string(c) + " has two parents");
            raw.nodes[c].parent = i;
        }
    }
    return renumber_preorder(raw);
}

}  // namespace

Ast ast_from_json(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    Ast out;
    if (doc.is_object() && doc.contains("nodes")) {
        out = read_flat(doc);
    } else {
        read_nested(doc, std::nullopt, out);
    }
    auto diags = validate_ast(out);
    if (!diags.empty())
        throw StructureError("ingested tree is invalid: " + diags.front().message);
    return out;
}

std::string ast_to_json(const Ast& ast) {
    if (ast.size() == 0) throw StructureError("cannot serialize an empty tree");
    std::vector<json> built(ast.nodes.size());
    // Children are built before parents by walking ids backwards: preorder
    // guarantees every child id exceeds its parent's.
    for (int i = ast.size() - 1; i >= 0; --i) {
        const AstNode& node = ast.nodes[i];
        json obj;
        obj["label"] = node.label;
        obj["value"] = node.value ? json(*node.value) : json(nullptr);
        json children = json::array();
        for (int c : node.children) children.push_back(std::move(built[c]));
        obj["children"] = std::move(children);
        built[i] = std::move(obj);
    }
    return built[0].dump(2);
}

}  // namespace astsum
