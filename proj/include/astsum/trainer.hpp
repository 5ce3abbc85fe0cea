#pragma once

#include <vector>

#include "astsum/corpus.hpp"
#include "astsum/model.hpp"
#include "astsum/vocab.hpp"

namespace astsum {

struct TrainOptions {
    int epochs = 100;
    int batch_size = 8;
    int patience = 10;   // epochs without improvement before stopping
    int min_freq = 1;
    // Stop once the epoch train loss drops this low; 0 disables the exit.
    double target_train_loss = 0.0;
};

struct EpochLog {
    int epoch = 0;             // 1-based
    double train_loss = 0.0;   // token-weighted mean over the epoch
    double valid_loss = 0.0;   // NaN when the corpus has no valid split
};

struct TrainResult {
    Model model;  // best parameters restored
    Vocabulary vocab_src;
    Vocabulary vocab_tgt;
    std::vector<EpochLog> log;
    int best_epoch = 0;
    double best_loss = 0.0;  // valid loss, or train loss without a valid split
    bool stopped_early = false;
};

// Builds vocabularies from the train split, trains with Adam, keeps the
// best-by-valid-loss parameters (train loss when no valid split exists).
// Fully deterministic for a fixed config and corpus.
TrainResult train(const ModelConfig& base_config, const Corpus& corpus, const TrainOptions& opts);

}  // namespace astsum
