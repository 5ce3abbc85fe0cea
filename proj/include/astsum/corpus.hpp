#pragma once

#include <optional>
#include <string>
#include <vector>

#include "astsum/ast.hpp"

namespace astsum {

// One code/summary pair. The tree is either parsed from `code` or supplied
// directly in the data file.
struct SourceUnit {
    std::string id;
    std::string code;
    std::string summary;
    Ast ast;
    std::string split;  // train | valid | test
};

struct Corpus {
    std::vector<SourceUnit> units;

    std::vector<const SourceUnit*> split(const std::string& name) const;
    bool empty() const { return units.empty(); }
};

// JSON Lines, one object per line:
//   {"id": str, "code": str, "summary": str, "ast": optional, "split": str}
// Units without "ast" are parsed from code; any failure is reported as a
// data error naming the unit. Throws IoError / SchemaError / EmptyCorpusError.
Corpus load_corpus_jsonl(const std::string& path);

// Lowercase; runs of [a-z0-9_] become word tokens; every other visible
// character stands alone as a punctuation token.
std::vector<std::string> tokenize_summary(const std::string& text);

// Space-joined detokenization for printing decoded summaries.
std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace astsum
