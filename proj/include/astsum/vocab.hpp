#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace astsum {

// Token table with the four reserved ids. Construction is deterministic:
// content tokens are ranked by frequency (descending), ties broken
// lexicographically.
struct Vocabulary {
    static constexpr int kPad = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kUnk = 3;

    std::vector<std::string> id_to_token{"<pad>", "<bos>", "<eos>", "<unk>"};
    std::unordered_map<std::string, int> token_to_id;
    int min_freq = 1;

    int size() const { return static_cast<int>(id_to_token.size()); }
    int id(const std::string& token) const;       // kUnk for unknown tokens
    const std::string& token(int id) const;       // throws VocabError out of range

    static Vocabulary build(const std::vector<std::vector<std::string>>& texts, int min_freq);

    nlohmann::ordered_json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);
};

}  // namespace astsum
