#include "astsum/corpus.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "astsum/errors.hpp"
#include "astsum/minilang.hpp"

namespace astsum {

std::vector<const SourceUnit*> Corpus::split(const std::string& name) const {
    std::vector<const SourceUnit*> out;
    for (const SourceUnit& u : units) {
        if (u.split == name) out.push_back(&u);
    }
    return out;
}

Corpus load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file '" + path + "'");

    Corpus corpus;
    std::set<std::string> seen_ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError("corpus line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        if (!j.is_object()) throw SchemaError("corpus line " + std::to_string(lineno) + ": expected an object");

        SourceUnit unit;
        auto need_string = [&](const char* key) {
            if (!j.contains(key) || !j[key].is_string()) {
                throw SchemaError("corpus line " + std::to_string(lineno) + ": missing string field '" +
                                  key + "'");
            }
            return j[key].get<std::string>();
        };
        unit.id = need_string("id");
        unit.summary = need_string("summary");
        unit.split = need_string("split");
        if (unit.split != "train" && unit.split != "valid" && unit.split != "test") {
            throw SchemaError("unit '" + unit.id + "': split must be train, valid, or test");
        }
        if (!seen_ids.insert(unit.id).second) {
            throw SchemaError("duplicate unit id '" + unit.id + "'");
        }
        if (j.contains("code") && j["code"].is_string()) unit.code = j["code"].get<std::string>();

        if (j.contains("ast") && !j["ast"].is_null()) {
            try {
                unit.ast = ast_from_json(j["ast"].dump());
            } catch (const Error& e) {
                throw SchemaError("unit '" + unit.id + "': bad ast: " + e.what());
            }
        } else if (!unit.code.empty()) {
            try {
                unit.ast = parse_minilang_source(unit.code);
            } catch (const Error& e) {
                // Inside a data file a broken unit is a data problem, not a
                // direct parse request.
                throw SchemaError("unit '" + unit.id + "': code does not parse: " + e.what());
            }
        } else {
            throw SchemaError("unit '" + unit.id + "': needs either code or ast");
        }
        corpus.units.push_back(std::move(unit));
    }
    if (corpus.empty()) throw EmptyCorpusError("corpus file '" + path + "' holds no units");
    return corpus;
}

std::vector<std::string> tokenize_summary(const std::string& text) {
    std::vector<std::string> tokens;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            tokens.push_back(word);
            word.clear();
        }
    };
    for (unsigned char c : text) {
        const unsigned char lc = static_cast<unsigned char>(std::tolower(c));
        if (std::isalnum(lc) || lc == '_') {
            word.push_back(static_cast<char>(lc));
        } else if (std::isspace(lc)) {
            flush();
        } else {
            flush();
            tokens.push_back(std::string(1, static_cast<char>(lc)));
        }
    }
    flush();
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::ostringstream out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out << ' ';
        out << tokens[i];
    }
    return out.str();
}

}  // namespace astsum
