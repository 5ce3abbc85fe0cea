#include <doctest.h>

#include <random>

#include "astsum/ast.hpp"
#include "astsum/errors.hpp"
#include "astsum/minilang.hpp"
#include "test_util.hpp"

using namespace astsum;

TEST_CASE("render_token prefers value over label") {
    AstNode n;
    n.label = "Num";
    CHECK(render_token(n) == "Num");
    n.value = "1";
    CHECK(render_token(n) == "1");
}

TEST_CASE("single node round-trips through JSON") {
    const Ast ast = ast_from_json(R"({"label":"Num","value":"1","children":[]})");
    REQUIRE(ast.size() == 1);
    CHECK(ast.nodes[0].label == "Num");
    CHECK(*ast.nodes[0].value == "1");
    CHECK(!ast.nodes[0].parent.has_value());
    CHECK(validate_ast(ast).empty());
}

TEST_CASE("parse and JSON ingestion agree on the same tree") {
    const Ast parsed = parse_minilang_source("fn f(a) { a = a + 1; }");
    const Ast reread = ast_from_json(ast_to_json(parsed));
    CHECK(structurally_equal(parsed, reread));
}

TEST_CASE("round-trip identity over random trees") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const Ast a = testutil::random_tree(rng, 1 + static_cast<int>(rng() % 20));
        const Ast b = ast_from_json(ast_to_json(a));
        CHECK(structurally_equal(a, b));
        // Deterministic serialization: equality extends to bytes.
        CHECK(ast_to_json(a) == ast_to_json(b));
    }
}

TEST_CASE("missing fields are schema errors") {
    CHECK_THROWS_AS(ast_from_json(R"({"value":"1","children":[]})"), SchemaError);
    CHECK_THROWS_AS(ast_from_json(R"({"label":3,"value":null,"children":[]})"), SchemaError);
    CHECK_THROWS_AS(ast_from_json("not json at all"), SchemaError);
}

TEST_CASE("flat node listing with a self-cycle is a structure error") {
    const char* doc = R"({"nodes":[{"label":"Num","value":null,"children":[0]}]})";
    CHECK_THROWS_AS(ast_from_json(doc), StructureError);
}

TEST_CASE("flat node listing with two roots is a structure error") {
    const char* doc =
        R"({"nodes":[{"label":"A","value":null,"children":[]},{"label":"B","value":null,"children":[]}]})";
    CHECK_THROWS_AS(ast_from_json(doc), StructureError);
}

TEST_CASE("flat listing out of preorder is renumbered") {
    // Root last; ingestion must canonicalize ids to preorder.
    const char* doc = R"({"nodes":[
        {"label":"Num","value":"1","children":[]},
        {"label":"Num","value":"2","children":[]},
        {"label":"BinOp","value":"+","children":[0,1]}]})";
    const Ast ast = ast_from_json(doc);
    REQUIRE(ast.size() == 3);
    CHECK(ast.nodes[0].label == "BinOp");
    CHECK(*ast.nodes[1].value == "1");
    CHECK(*ast.nodes[2].value == "2");
    CHECK(validate_ast(ast).empty());
}

TEST_CASE("validate_ast flags inconsistent links") {
    Ast ast;
    ast.nodes.resize(2);
    ast.nodes[0] = {0, "Block", std::nullopt, std::nullopt, {1}};
    ast.nodes[1] = {1, "Num", "1", std::nullopt, {}};  // parent link missing
    CHECK(!validate_ast(ast).empty());

    ast.nodes[1].parent = 0;
    CHECK(validate_ast(ast).empty());
}

TEST_CASE("validate_ast flags out-of-preorder ids") {
    Ast ast;
    ast.nodes.resize(3);
    // Children listed right-to-left: ids no longer increase in child order.
    ast.nodes[0] = {0, "BinOp", "+", std::nullopt, {2, 1}};
    ast.nodes[1] = {1, "Num", "1", 0, {}};
    ast.nodes[2] = {2, "Num", "2", 0, {}};
    CHECK(!validate_ast(ast).empty());

    const Ast fixed = renumber_preorder(ast);
    CHECK(validate_ast(fixed).empty());
    CHECK(*fixed.nodes[1].value == "2");  // first child keeps its place, gets id 1
}

TEST_CASE("renumber_preorder rejects non-trees") {
    Ast cycle;
    cycle.nodes.resize(2);
    cycle.nodes[0] = {0, "A", std::nullopt, 1, {1}};
    cycle.nodes[1] = {1, "B", std::nullopt, 0, {0}};
    CHECK_THROWS_AS(renumber_preorder(cycle), StructureError);
}

TEST_CASE("structural equality ignores nothing") {
    const Ast a = parse_minilang_source("fn f() { return 1; }");
    Ast b = a;
    CHECK(structurally_equal(a, b));
    b.nodes[3].value = "2";
    CHECK(!structurally_equal(a, b));
}
