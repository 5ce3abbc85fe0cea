#include "astsum/eval.hpp"

#include <cstdio>
#include <sstream>

#include "astsum/baseline.hpp"
#include "astsum/errors.hpp"
#include "astsum/linearize.hpp"
#include "astsum/metrics.hpp"

namespace astsum {

namespace {

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

std::string pct_of_percent(double percent) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", percent);
    return buf;
}

}  // namespace

MetricReport evaluate(const Model& model, const Vocabulary& vocab_src, const Vocabulary& vocab_tgt,
                      const std::vector<const SourceUnit*>& units, int beam_width) {
    if (beam_width < 1) throw ConfigError("beam width must be >= 1");
    if (units.empty()) throw EmptyCorpusError("no units to evaluate");

    MetricReport report;
    report.beam = beam_width;
    for (const SourceUnit* unit : units) {
        const LinearSeq seq = preorder(unit->ast);
        std::vector<int> src_ids;
        src_ids.reserve(seq.tokens.size());
        for (const std::string& tok : seq.tokens) src_ids.push_back(vocab_src.id(tok));

        const EncoderOutput enc = model.encode(seq, unit->ast, src_ids);
        const std::vector<int> out_ids =
            beam_width == 1 ? model.decode_greedy(enc) : model.decode_beam(enc, beam_width);

        std::vector<std::string> candidate;
        candidate.reserve(out_ids.size());
        for (int id : out_ids) candidate.push_back(vocab_tgt.token(id));
        const std::vector<std::string> reference = tokenize_summary(unit->summary);

        report.bleu += bleu(candidate, reference);
        report.rouge_l += rouge_l(candidate, reference);
        report.meteor += meteor_lite(candidate, reference);
        ++report.samples;
    }
    report.bleu /= report.samples;
    report.rouge_l /= report.samples;
    report.meteor /= report.samples;
    return report;
}

std::string render_report_text(const MetricReport& report, const std::string& dataset_label) {
    std::ostringstream out;
    out << "code summary metrics, percentages, columns BLEU METEOR ROUGE-L\n";
    out << "\n";
    out << "this run " << dataset_label << " " << pct(report.bleu) << " " << pct(report.meteor)
        << " " << pct(report.rouge_l) << " (" << report.samples << " samples, ";
    if (report.beam == 1) {
        out << "greedy)\n";
    } else {
        out << "beam=" << report.beam << ")\n";
    }

    const BaselineRow* ref = baseline_table().find("AST-MHSA");
    if (ref != nullptr) {
        out << "AST-MHSA (paper) Java " << pct_of_percent(ref->java.bleu) << " "
            << pct_of_percent(ref->java.meteor) << " " << pct_of_percent(ref->java.rouge_l)
            << " [paper-reported, not reproduced]\n";
        out << "AST-MHSA (paper) Python " << pct_of_percent(ref->python.bleu) << " "
            << pct_of_percent(ref->python.meteor) << " " << pct_of_percent(ref->python.rouge_l)
            << " [paper-reported, not reproduced]\n";
    }
    return out.str();
}

nlohmann::ordered_json report_to_json(const MetricReport& report, const std::string& dataset_label) {
    nlohmann::ordered_json j;
    j["dataset"] = dataset_label;
    j["samples"] = report.samples;
    j["beam"] = report.beam;
    j["bleu"] = report.bleu;
    j["meteor"] = report.meteor;
    j["rouge_l"] = report.rouge_l;

    nlohmann::ordered_json refs = nlohmann::ordered_json::array();
    const BaselineRow* ref = baseline_table().find("AST-MHSA");
    if (ref != nullptr) {
        for (const char* name : {"Java", "Python"}) {
            const BaselineScores& s = std::string(name) == "Java" ? ref->java : ref->python;
            nlohmann::ordered_json row;
            row["method"] = "AST-MHSA (paper)";
            row["dataset"] = name;
            row["bleu_pct"] = s.bleu;
            row["meteor_pct"] = s.meteor;
            row["rouge_l_pct"] = s.rouge_l;
            row["note"] = "paper-reported, not reproduced";
            refs.push_back(row);
        }
    }
    j["reference"] = refs;
    return j;
}

}  // namespace astsum
