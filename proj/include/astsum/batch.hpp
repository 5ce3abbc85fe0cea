#pragma once

#include <vector>

#include "astsum/config.hpp"
#include "astsum/corpus.hpp"
#include "astsum/relations.hpp"
#include "astsum/vocab.hpp"

namespace astsum {

// One unit mapped to model inputs. Every sample carries its own attention
// patterns; batching never mixes attention across samples.
struct PreparedSample {
    const SourceUnit* unit = nullptr;
    std::vector<int> src_ids;                 // POT tokens -> source vocab ids
    std::vector<AttentionPattern> patterns;   // one per head
    std::vector<int> tgt_in;                  // BOS + summary ids (+ PAD up to batch width)
    std::vector<int> tgt_out;                 // summary ids + EOS (+ PAD)
};

using Batch = std::vector<PreparedSample>;

// Summaries are truncated to fit max_len (BOS plus at most max_len-1 tokens).
PreparedSample prepare_sample(const SourceUnit& unit, const Vocabulary& vocab_src,
                              const Vocabulary& vocab_tgt, const ModelConfig& config);

// Groups units in the given order; the last batch may be short. Target rows
// inside a batch are padded to the widest sample.
std::vector<Batch> batchify(const std::vector<const SourceUnit*>& units, const Vocabulary& vocab_src,
                            const Vocabulary& vocab_tgt, const ModelConfig& config, int batch_size);

}  // namespace astsum
