#include "astsum/vocab.hpp"

#include <algorithm>
#include <map>

#include "astsum/errors.hpp"

namespace astsum {

int Vocabulary::id(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
    if (id < 0 || id >= size()) {
        throw VocabError("token id " + std::to_string(id) + " outside vocabulary of " +
                         std::to_string(size()));
    }
    return id_to_token[id];
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& texts, int min_freq) {
    if (min_freq < 1) throw VocabError("min_freq must be >= 1");
    // std::map gives the lexicographic half of the ordering for free.
    std::map<std::string, long long> freq;
    for (const auto& text : texts) {
        for (const auto& tok : text) ++freq[tok];
    }
    std::vector<std::pair<std::string, long long>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    Vocabulary vocab;
    vocab.min_freq = min_freq;
    for (int i = 0; i < 4; ++i) vocab.token_to_id[vocab.id_to_token[i]] = i;
    for (const auto& [tok, count] : ranked) {
        if (count < min_freq) continue;
        if (vocab.token_to_id.count(tok)) continue;  // someone used a reserved literal
        vocab.token_to_id[tok] = vocab.size();
        vocab.id_to_token.push_back(tok);
    }
    return vocab;
}

nlohmann::ordered_json Vocabulary::to_json() const {
    nlohmann::ordered_json j;
    j["min_freq"] = min_freq;
    j["tokens"] = id_to_token;
    return j;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()) {
        throw SchemaError("vocabulary JSON needs a 'tokens' array");
    }
    Vocabulary vocab;
    vocab.id_to_token.clear();
    vocab.token_to_id.clear();
    vocab.min_freq = j.value("min_freq", 1);
    for (const auto& t : j["tokens"]) {
        if (!t.is_string()) throw SchemaError("vocabulary tokens must be strings");
        vocab.id_to_token.push_back(t.get<std::string>());
    }
    if (vocab.size() < 4) throw SchemaError("vocabulary must include the 4 reserved tokens");
    static const char* kReserved[4] = {"<pad>", "<bos>", "<eos>", "<unk>"};
    for (int i = 0; i < 4; ++i) {
        if (vocab.id_to_token[i] != kReserved[i]) {
            throw SchemaError("vocabulary reserved slot " + std::to_string(i) + " must be " +
                              kReserved[i]);
        }
    }
    for (int i = 0; i < vocab.size(); ++i) {
        if (!vocab.token_to_id.emplace(vocab.id_to_token[i], i).second) {
            throw SchemaError("duplicate vocabulary token '" + vocab.id_to_token[i] + "'");
        }
    }
    return vocab;
}

}  // namespace astsum
