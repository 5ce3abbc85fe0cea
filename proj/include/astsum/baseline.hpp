#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace astsum {

struct BaselineScores {
    double bleu = 0.0;
    double meteor = 0.0;
    double rouge_l = 0.0;
};

struct BaselineRow {
    std::string method;
    std::string input;  // input-type category
    BaselineScores java;
    BaselineScores python;
};

// Published comparison numbers carried as reference labels only — none of
// them are produced or reproduced by this code.
struct BaselineTable {
    std::string caption;
    std::vector<BaselineRow> rows;

    const BaselineRow* find(const std::string& method) const;
};

// Compiled-in copy of the bundled table (data/baseline_table.json mirrors it;
// a test keeps the two in sync).
const BaselineTable& baseline_table();

BaselineTable baseline_table_from_json(const nlohmann::json& j);

// The raw JSON text of the compiled-in copy.
const char* baseline_table_json_text();

}  // namespace astsum
