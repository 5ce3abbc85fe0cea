#include "astsum/baseline.hpp"

#include "astsum/errors.hpp"

namespace astsum {

namespace {

constexpr const char* kBaselineJson = R"json({
  "caption": "Comparison of AST-MHSA with the baseline methods, categorized based on the input type",
  "columns": ["BLEU(%)", "METEOR(%)", "ROUGE-L(%)"],
  "rows": [
    {"method": "CODE-NN", "input": "Code", "java": {"bleu": 27.6, "meteor": 12.61, "rouge_l": 41.1}, "python": {"bleu": 17.36, "meteor": 9.29, "rouge_l": 37.81}},
    {"method": "API+CODE", "input": "Code", "java": {"bleu": 41.31, "meteor": 23.73, "rouge_l": 52.25}, "python": {"bleu": 15.36, "meteor": 8.57, "rouge_l": 33.65}},
    {"method": "Dual Model", "input": "Code", "java": {"bleu": 42.39, "meteor": 25.77, "rouge_l": 53.61}, "python": {"bleu": 21.8, "meteor": 11.14, "rouge_l": 39.45}},
    {"method": "BaseTrans[1]", "input": "Code", "java": {"bleu": 44.58, "meteor": 29.12, "rouge_l": 53.63}, "python": {"bleu": 35.77, "meteor": 16.33, "rouge_l": 38.95}},
    {"method": "Code-Transformer[57]", "input": "Code", "java": {"bleu": 45.74, "meteor": 29.65, "rouge_l": 54.96}, "python": {"bleu": 30.93, "meteor": 18.42, "rouge_l": 43.67}},
    {"method": "Tree2Seq[11]", "input": "AST(Tree)", "java": {"bleu": 37.88, "meteor": 22.55, "rouge_l": 51.5}, "python": {"bleu": 20.07, "meteor": 8.96, "rouge_l": 35.64}},
    {"method": "RL+Hydrid2Seq[51]", "input": "AST(Tree)", "java": {"bleu": 38.22, "meteor": 22.75, "rouge_l": 51.91}, "python": {"bleu": 19.28, "meteor": 9.75, "rouge_l": 39.34}},
    {"method": "GCN*[22]", "input": "AST(Tree)", "java": {"bleu": 43.94, "meteor": 28.92, "rouge_l": 55.45}, "python": {"bleu": 32.31, "meteor": 19.54, "rouge_l": 39.67}},
    {"method": "GAT*[50]", "input": "AST(Tree)", "java": {"bleu": 44.63, "meteor": 29.19, "rouge_l": 55.84}, "python": {"bleu": 32.16, "meteor": 19.3, "rouge_l": 39.12}},
    {"method": "Graph-Transformer*[40]", "input": "AST(Tree)", "java": {"bleu": 44.68, "meteor": 29.29, "rouge_l": 54.98}, "python": {"bleu": 32.55, "meteor": 19.58, "rouge_l": 39.66}},
    {"method": "Code2Seq*[4]", "input": "AST(PD)", "java": {"bleu": 24.42, "meteor": 15.35, "rouge_l": 33.95}, "python": {"bleu": 17.54, "meteor": 8.49, "rouge_l": 20.93}},
    {"method": "Code2Seq(Transformer)*", "input": "AST(PD)", "java": {"bleu": 35.08, "meteor": 21.69, "rouge_l": 42.77}, "python": {"bleu": 29.79, "meteor": 16.73, "rouge_l": 40.59}},
    {"method": "DeepCom[18]", "input": "AST(SBT)", "java": {"bleu": 39.75, "meteor": 32.06, "rouge_l": 52.67}, "python": {"bleu": 20.78, "meteor": 9.98, "rouge_l": 37.35}},
    {"method": "Transformer(SBT)*", "input": "AST(SBT)", "java": {"bleu": 43.37, "meteor": 28.36, "rouge_l": 52.37}, "python": {"bleu": 31.33, "meteor": 19.02, "rouge_l": 44.09}},
    {"method": "AST-Trans(SBT)*", "input": "AST(SBT)", "java": {"bleu": 44.15, "meteor": 29.58, "rouge_l": 54.73}, "python": {"bleu": 32.86, "meteor": 19.89, "rouge_l": 45.92}},
    {"method": "Trasformer(POT)*", "input": "AST(POT)", "java": {"bleu": 39.62, "meteor": 26.3, "rouge_l": 50.63}, "python": {"bleu": 31.86, "meteor": 19.63, "rouge_l": 44.73}},
    {"method": "AST-Trans", "input": "AST(POT)", "java": {"bleu": 48.29, "meteor": 30.94, "rouge_l": 55.85}, "python": {"bleu": 34.72, "meteor": 20.71, "rouge_l": 47.77}},
    {"method": "AST-MHSA", "input": "AST(POT)", "java": {"bleu": 45.32, "meteor": 32.44, "rouge_l": 53.28}, "python": {"bleu": 32.52, "meteor": 20.12, "rouge_l": 44.23}}
  ]
})json";

BaselineScores scores_from(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    BaselineScores s;
    try {
        s.bleu = j.at("bleu").get<double>();
        s.meteor = j.at("meteor").get<double>();
        s.rouge_l = j.at("rouge_l").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return s;
}

}  // namespace

const BaselineRow* BaselineTable::find(const std::string& method) const {
    for (const BaselineRow& row : rows) {
        if (row.method == method) return &row;
    }
    return nullptr;
}

BaselineTable baseline_table_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
        throw SchemaError("baseline table needs a rows array");
    }
    BaselineTable table;
    table.caption = j.value("caption", "");
    for (const auto& r : j["rows"]) {
        if (!r.is_object() || !r.contains("method")) throw SchemaError("baseline row needs a method");
        BaselineRow row;
        try {
            row.method = r["method"].get<std::string>();
            row.input = r.value("input", "");
            row.java = scores_from(r.at("java"), row.method + "/java");
            row.python = scores_from(r.at("python"), row.method + "/python");
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("baseline row: ") + e.what());
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

const BaselineTable& baseline_table() {
    static const BaselineTable table = baseline_table_from_json(nlohmann::json::parse(kBaselineJson));
    return table;
}

const char* baseline_table_json_text() { return kBaselineJson; }

}  // namespace astsum
