#include "astsum/linearize.hpp"

#include <utility>

#include "astsum/errors.hpp"

namespace astsum {

const char* traversal_name(Traversal t) {
    return t == Traversal::Pot ? "POT" : "SBT";
}

Traversal traversal_from_name(const std::string& name) {
    if (name == "POT" || name == "pot") return Traversal::Pot;
    if (name == "SBT" || name == "sbt") return Traversal::Sbt;
    throw ConfigError("unknown traversal '" + name + "' (expected POT or SBT)");
}

LinearSeq preorder(const Ast& ast) {
    LinearSeq seq;
    seq.kind = Traversal::Pot;
    seq.tokens.reserve(ast.size());
    seq.node_ids.reserve(ast.size());
    for (int id = 0; id < ast.size(); ++id) {
        seq.tokens.push_back(render_token(ast.nodes[id]));
        seq.node_ids.push_back(id);
    }
    return seq;
}

LinearSeq sbt(const Ast& ast) {
    LinearSeq seq;
    seq.kind = Traversal::Sbt;
    seq.tokens.reserve(4 * static_cast<size_t>(ast.size()));
    seq.node_ids.reserve(4 * static_cast<size_t>(ast.size()));
    if (ast.size() == 0) return seq;

    // Explicit stack instead of recursion: deep BinOp/Call chains would
    // otherwise bound the tree depth by the C++ stack.
    enum class Phase { Open, Close };
    std::vector<std::pair<int, Phase>> stack;
    stack.emplace_back(0, Phase::Open);
    while (!stack.empty()) {
        auto [id, phase] = stack.back();
        stack.pop_back();
        const AstNode& node = ast.nodes[id];
        if (phase == Phase::Open) {
            seq.tokens.emplace_back("(");
            seq.node_ids.push_back(id);
            seq.tokens.push_back(render_token(node));
            seq.node_ids.push_back(id);
            stack.emplace_back(id, Phase::Close);
            for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
                stack.emplace_back(*it, Phase::Open);
            }
        } else {
            seq.tokens.emplace_back(")");
            seq.node_ids.push_back(id);
            seq.tokens.push_back(render_token(node));
            seq.node_ids.push_back(id);
        }
    }
    return seq;
}

SeqStatsReport sequence_stats(const std::vector<LinearSeq>& seqs) {
    if (seqs.empty()) throw EmptyInputError("sequence_stats needs at least one sequence");
    SeqStatsReport report;
    long long pot_sum = 0;
    long long sbt_sum = 0;
    for (const LinearSeq& seq : seqs) {
        KindStats& ks = seq.kind == Traversal::Pot ? report.pot : report.sbt;
        (seq.kind == Traversal::Pot ? pot_sum : sbt_sum) += seq.n();
        if (ks.count == 0) {
            ks.min_len = ks.max_len = seq.n();
        } else {
            ks.min_len = std::min(ks.min_len, seq.n());
            ks.max_len = std::max(ks.max_len, seq.n());
        }
        ks.count += 1;
    }
    if (report.pot.count > 0) report.pot.mean_len = static_cast<double>(pot_sum) / report.pot.count;
    if (report.sbt.count > 0) report.sbt.mean_len = static_cast<double>(sbt_sum) / report.sbt.count;
    if (report.pot.count > 0 && report.sbt.count > 0 && report.pot.mean_len > 0.0) {
        report.sbt_pot_ratio = report.sbt.mean_len / report.pot.mean_len;
    }
    return report;
}

}  // namespace astsum
