#include "astsum/batch.hpp"

#include <algorithm>

#include "astsum/errors.hpp"

namespace astsum {

PreparedSample prepare_sample(const SourceUnit& unit, const Vocabulary& vocab_src,
                              const Vocabulary& vocab_tgt, const ModelConfig& config) {
    PreparedSample s;
    s.unit = &unit;
    const LinearSeq seq = preorder(unit.ast);
    s.src_ids.reserve(seq.tokens.size());
    for (const std::string& tok : seq.tokens) s.src_ids.push_back(vocab_src.id(tok));
    s.patterns = build_head_masks(ancestor_matrix(unit.ast, seq), sibling_matrix(unit.ast, seq),
                                  config);

    std::vector<std::string> summary = tokenize_summary(unit.summary);
    if (static_cast<int>(summary.size()) > config.max_len - 1) {
        summary.resize(config.max_len - 1);
    }
    s.tgt_in.push_back(Vocabulary::kBos);
    for (const std::string& tok : summary) {
        const int id = vocab_tgt.id(tok);
        s.tgt_in.push_back(id);
        s.tgt_out.push_back(id);
    }
    s.tgt_out.push_back(Vocabulary::kEos);
    return s;
}

std::vector<Batch> batchify(const std::vector<const SourceUnit*>& units, const Vocabulary& vocab_src,
                            const Vocabulary& vocab_tgt, const ModelConfig& config, int batch_size) {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    std::vector<Batch> batches;
    for (size_t start = 0; start < units.size(); start += batch_size) {
        Batch batch;
        const size_t stop = std::min(units.size(), start + batch_size);
        size_t width = 0;
        for (size_t i = start; i < stop; ++i) {
            batch.push_back(prepare_sample(*units[i], vocab_src, vocab_tgt, config));
            width = std::max(width, batch.back().tgt_in.size());
        }
        for (PreparedSample& s : batch) {
            s.tgt_in.resize(width, Vocabulary::kPad);
            s.tgt_out.resize(width, Vocabulary::kPad);
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

}  // namespace astsum
