#pragma once

#include <string>
#include <vector>

#include "astsum/ast.hpp"

namespace astsum {

enum class Traversal { Pot, Sbt };

const char* traversal_name(Traversal t);               // "POT" / "SBT"
Traversal traversal_from_name(const std::string& name); // throws ConfigError

// One linearized view of a tree. node_ids[i] is the id of the node that
// produced tokens[i], so downstream relation lookups stay aligned.
struct LinearSeq {
    Traversal kind = Traversal::Pot;
    std::vector<std::string> tokens;
    std::vector<int> node_ids;

    int n() const { return static_cast<int>(tokens.size()); }
};

// POT: one rendered token per node, in id order (ids are canonical preorder).
LinearSeq preorder(const Ast& ast);

// SBT: per node emits "(", render, <children...>, ")", render — 4 tokens/node.
LinearSeq sbt(const Ast& ast);

struct KindStats {
    int count = 0;
    int min_len = 0;
    int max_len = 0;
    double mean_len = 0.0;
};

struct SeqStatsReport {
    KindStats pot;               // count == 0 when the kind is absent
    KindStats sbt;
    double sbt_pot_ratio = 0.0;  // mean SBT length / mean POT length; 0 if either absent
};

// Throws EmptyInputError on an empty list.
SeqStatsReport sequence_stats(const std::vector<LinearSeq>& seqs);

}  // namespace astsum
