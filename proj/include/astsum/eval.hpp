#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "astsum/corpus.hpp"
#include "astsum/model.hpp"
#include "astsum/vocab.hpp"

namespace astsum {

// Corpus-level scores are means of per-sample sentence scores, kept as
// fractions in [0,1]; rendering converts to percentages.
struct MetricReport {
    double bleu = 0.0;
    double rouge_l = 0.0;
    double meteor = 0.0;
    int samples = 0;
    int beam = 1;  // 1 means greedy decoding
};

MetricReport evaluate(const Model& model, const Vocabulary& vocab_src, const Vocabulary& vocab_tgt,
                      const std::vector<const SourceUnit*>& units, int beam_width);

// Text table: this run's row plus the bundled reference rows, all as
// "method dataset BLEU METEOR ROUGE-L" with two-decimal percentages.
std::string render_report_text(const MetricReport& report, const std::string& dataset_label);

nlohmann::ordered_json report_to_json(const MetricReport& report, const std::string& dataset_label);

}  // namespace astsum
