#include <doctest.h>

#include <random>

#include "astsum/errors.hpp"
#include "astsum/relations.hpp"
#include "test_util.hpp"

using namespace astsum;

namespace {

// Tree T0: 0 FunctionDef -> {1 Param, 2 Block}; 2 -> {3 Assign, 4 Return}.
Ast t0() {
    Ast ast;
    ast.nodes.resize(5);
    ast.nodes[0] = {0, "FunctionDef", "f", std::nullopt, {1, 2}};
    ast.nodes[1] = {1, "Param", "a", 0, {}};
    ast.nodes[2] = {2, "Block", std::nullopt, 0, {3, 4}};
    ast.nodes[3] = {3, "Assign", std::nullopt, 2, {}};
    ast.nodes[4] = {4, "Return", std::nullopt, 2, {}};
    return ast;
}

// Independent ancestry oracle: walk j's way up from i, counting edges.
int oracle_ancestor(const Ast& ast, int i, int j) {
    if (i == j) return 0;
    int steps = 0;
    for (int cur = i; ast.nodes[cur].parent; ) {
        cur = *ast.nodes[cur].parent;
        ++steps;
        if (cur == j) return steps;  // j above i
    }
    steps = 0;
    for (int cur = j; ast.nodes[cur].parent; ) {
        cur = *ast.nodes[cur].parent;
        ++steps;
        if (cur == i) return -steps;  // j below i
    }
    return kNoRelation;
}

int oracle_sibling(const Ast& ast, int i, int j) {
    if (i == j) return 0;
    const auto& pi = ast.nodes[i].parent;
    const auto& pj = ast.nodes[j].parent;
    if (!pi || !pj || *pi != *pj) return kNoRelation;
    const auto& kids = ast.nodes[*pi].children;
    int posi = -1, posj = -1;
    for (int t = 0; t < static_cast<int>(kids.size()); ++t) {
        if (kids[t] == i) posi = t;
        if (kids[t] == j) posj = t;
    }
    return posj - posi;
}

}  // namespace

TEST_CASE("T0 ancestor matrix spot values") {
    const Ast ast = t0();
    const IntMatrix a = ancestor_matrix(ast, preorder(ast));
    for (int i = 0; i < 5; ++i) CHECK(a.at(i, i) == 0);
    CHECK(a.at(3, 0) == 2);
    CHECK(a.at(0, 3) == -2);
    CHECK(a.at(1, 2) == kNoRelation);
    CHECK(a.at(3, 2) == 1);
    CHECK(a.at(3, 4) == kNoRelation);
}

TEST_CASE("T0 sibling matrix spot values") {
    const Ast ast = t0();
    const IntMatrix s = sibling_matrix(ast, preorder(ast));
    CHECK(s.at(1, 2) == 1);
    CHECK(s.at(2, 1) == -1);
    CHECK(s.at(3, 4) == 1);
    CHECK(s.at(1, 3) == kNoRelation);
    CHECK(s.at(0, 0) == 0);
}

TEST_CASE("relation matrices demand a POT sequence") {
    const Ast ast = t0();
    CHECK_THROWS_AS(ancestor_matrix(ast, sbt(ast)), KindMismatchError);
    CHECK_THROWS_AS(sibling_matrix(ast, sbt(ast)), KindMismatchError);
}

TEST_CASE("matrices agree with brute-force oracles on 200 random trees") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 200; ++t) {
        const Ast ast = testutil::random_tree(rng, 1 + static_cast<int>(rng() % 12));
        const LinearSeq seq = preorder(ast);
        const IntMatrix a = ancestor_matrix(ast, seq);
        const IntMatrix s = sibling_matrix(ast, seq);
        const int n = ast.size();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                REQUIRE(a.at(i, j) == oracle_ancestor(ast, i, j));
                REQUIRE(s.at(i, j) == oracle_sibling(ast, i, j));
            }
        }
    }
}

TEST_CASE("antisymmetry and exclusivity hold on random trees") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 50; ++t) {
        const Ast ast = testutil::random_tree(rng, 1 + static_cast<int>(rng() % 15));
        const LinearSeq seq = preorder(ast);
        const IntMatrix a = ancestor_matrix(ast, seq);
        const IntMatrix s = sibling_matrix(ast, seq);
        for (int i = 0; i < ast.size(); ++i) {
            for (int j = 0; j < ast.size(); ++j) {
                if (a.at(i, j) != kNoRelation) CHECK(a.at(i, j) == -a.at(j, i));
                else CHECK(a.at(j, i) == kNoRelation);
                if (s.at(i, j) != kNoRelation) CHECK(s.at(i, j) == -s.at(j, i));
                else CHECK(s.at(j, i) == kNoRelation);
                if (i != j) {
                    const bool both = a.at(i, j) != kNoRelation && s.at(i, j) != kNoRelation;
                    CHECK(!both);
                }
            }
        }
    }
}

TEST_CASE("head masks follow the documented partition and thresholds") {
    const Ast ast = t0();
    const LinearSeq seq = preorder(ast);
    ModelConfig config;
    config.heads = 4;
    config.delta_anc = 2;
    config.delta_sib = 3;
    const auto patterns =
        build_head_masks(ancestor_matrix(ast, seq), sibling_matrix(ast, seq), config);
    REQUIRE(patterns.size() == 4);
    CHECK(patterns[0].relation == Relation::Ancestor);
    CHECK(patterns[1].relation == Relation::Ancestor);
    CHECK(patterns[2].relation == Relation::Sibling);
    CHECK(patterns[3].relation == Relation::Sibling);

    CHECK(patterns[0].allow.at(3, 0));        // |A| = 2 <= delta_anc
    CHECK(!patterns[2].allow.at(3, 0));       // ancestor pair invisible to sibling heads
    CHECK(patterns[2].allow.at(3, 3));        // diagonal always allowed
    CHECK(patterns[2].allow.at(1, 2));        // |S| = 1 <= delta_sib
}

TEST_CASE("tight thresholds cut distant pairs") {
    // Chain of 4: distances up to 3.
    Ast ast;
    ast.nodes.resize(4);
    ast.nodes[0] = {0, "A", std::nullopt, std::nullopt, {1}};
    ast.nodes[1] = {1, "B", std::nullopt, 0, {2}};
    ast.nodes[2] = {2, "C", std::nullopt, 1, {3}};
    ast.nodes[3] = {3, "D", std::nullopt, 2, {}};
    const LinearSeq seq = preorder(ast);
    ModelConfig config;
    config.heads = 2;
    config.delta_anc = 1;
    config.delta_sib = 1;
    const auto patterns =
        build_head_masks(ancestor_matrix(ast, seq), sibling_matrix(ast, seq), config);
    CHECK(patterns[0].allow.at(1, 0));
    CHECK(!patterns[0].allow.at(2, 0));  // distance 2 > 1
    CHECK(!patterns[0].allow.at(3, 0));  // distance 3 > 1
}

TEST_CASE("bias indices stay in range and follow the layout") {
    std::mt19937_64 rng(47);
    ModelConfig config;
    config.heads = 4;
    config.delta_anc = 3;
    config.delta_sib = 2;
    for (int t = 0; t < 30; ++t) {
        const Ast ast = testutil::random_tree(rng, 1 + static_cast<int>(rng() % 12));
        const LinearSeq seq = preorder(ast);
        const IntMatrix a = ancestor_matrix(ast, seq);
        const IntMatrix s = sibling_matrix(ast, seq);
        for (const AttentionPattern& pat : build_head_masks(a, s, config)) {
            const IntMatrix& rel = pat.relation == Relation::Ancestor ? a : s;
            for (int i = 0; i < ast.size(); ++i) {
                for (int j = 0; j < ast.size(); ++j) {
                    const int idx = pat.bias_index.at(i, j);
                    if (i == j) {
                        CHECK(idx == pat.self_index());
                    } else if (pat.allow.at(i, j)) {
                        REQUIRE(idx >= 0);
                        REQUIRE(idx < pat.self_index());
                        CHECK(idx == rel.at(i, j) + pat.delta);
                    } else {
                        CHECK(idx == pat.pad_index());
                    }
                }
            }
        }
    }
}

TEST_CASE("mask monotonicity: growing delta never removes pairs") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 20; ++t) {
        const Ast ast = testutil::random_tree(rng, 1 + static_cast<int>(rng() % 12));
        const LinearSeq seq = preorder(ast);
        const IntMatrix a = ancestor_matrix(ast, seq);
        const IntMatrix s = sibling_matrix(ast, seq);
        ModelConfig small, big;
        small.heads = big.heads = 2;
        small.delta_anc = small.delta_sib = 2;
        big.delta_anc = big.delta_sib = 5;
        const auto ps = build_head_masks(a, s, small);
        const auto pb = build_head_masks(a, s, big);
        for (size_t h = 0; h < ps.size(); ++h) {
            for (int i = 0; i < ast.size(); ++i) {
                for (int j = 0; j < ast.size(); ++j) {
                    if (ps[h].allow.at(i, j)) CHECK(pb[h].allow.at(i, j));
                }
            }
        }
    }
}

TEST_CASE("config validation for masks") {
    const Ast ast = t0();
    const LinearSeq seq = preorder(ast);
    const IntMatrix a = ancestor_matrix(ast, seq);
    const IntMatrix s = sibling_matrix(ast, seq);
    ModelConfig odd;
    odd.heads = 3;
    CHECK_THROWS_AS(build_head_masks(a, s, odd), ConfigError);
    ModelConfig zero_delta;
    zero_delta.delta_anc = 0;
    CHECK_THROWS_AS(build_head_masks(a, s, zero_delta), ConfigError);
}

TEST_CASE("sparsity of the depth-3 perfect binary tree") {
    const Ast tree = make_perfect_binary_tree(3);
    REQUIRE(tree.size() == 7);
    const LinearSeq seq = preorder(tree);
    ModelConfig config;
    config.heads = 2;
    config.delta_anc = 16;  // effectively unbounded at this depth
    config.delta_sib = 16;
    const auto patterns =
        build_head_masks(ancestor_matrix(tree, seq), sibling_matrix(tree, seq), config);
    const SparsityReport report = sparsity_report(patterns);
    REQUIRE(report.per_head.size() == 2);
    CHECK(report.per_head[0].relation == Relation::Ancestor);
    CHECK(report.per_head[0].allowed == 27);  // 20 ordered pairs + 7 diagonal
    CHECK(report.per_head[1].allowed == 13);  // 6 ordered pairs + 7 diagonal
    CHECK(report.total == 40);
    CHECK(report.ratio == doctest::Approx(40.0 / (2.0 * 49.0)));
}

TEST_CASE("sparsity_growth rows shrink quadratically slower than n^2") {
    const auto rows = sparsity_growth(2, 6);
    REQUIRE(rows.size() == 5);
    CHECK(rows[1].depth == 3);
    CHECK(rows[1].n == 7);
    CHECK(rows[1].ancestor_allowed == 27);
    CHECK(rows[1].sibling_allowed == 13);
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].ancestor_ratio < rows[i - 1].ancestor_ratio);
        CHECK(rows[i].sibling_ratio < rows[i - 1].sibling_ratio);
    }
}

TEST_CASE("sparsity_report rejects an empty pattern list") {
    CHECK_THROWS_AS(sparsity_report({}), EmptyInputError);
}

TEST_CASE("single-node tree keeps its diagonal") {
    const Ast tree = make_perfect_binary_tree(1);
    REQUIRE(tree.size() == 1);
    const LinearSeq seq = preorder(tree);
    ModelConfig config;
    config.heads = 2;
    const auto patterns =
        build_head_masks(ancestor_matrix(tree, seq), sibling_matrix(tree, seq), config);
    CHECK(patterns[0].allow.at(0, 0));
    CHECK(patterns[1].allow.at(0, 0));
}
