#include "astsum/trainer.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "astsum/batch.hpp"
#include "astsum/errors.hpp"

namespace astsum {

namespace {

// Own Fisher-Yates: std::shuffle's draw sequence is implementation-defined,
// which would make run logs differ across standard libraries.
void shuffle_units(std::vector<const SourceUnit*>& units, std::mt19937_64& rng) {
    for (size_t i = units.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng() % i);
        std::swap(units[i - 1], units[j]);
    }
}

double run_split(Model& model, const std::vector<Batch>& batches, bool want_grad, double lr) {
    double total = 0.0;
    long long tokens = 0;
    for (const Batch& batch : batches) {
        const Model::LossResult res = model.forward_loss(batch, want_grad);
        if (want_grad) model.params().adam_step(lr);
        total += res.loss * res.tokens;
        tokens += res.tokens;
    }
    return total / static_cast<double>(tokens);
}

}  // namespace

TrainResult train(const ModelConfig& base_config, const Corpus& corpus, const TrainOptions& opts) {
    if (opts.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (opts.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (opts.patience < 1) throw ConfigError("patience must be >= 1");

    std::vector<const SourceUnit*> train_units = corpus.split("train");
    if (train_units.empty()) throw EmptyCorpusError("corpus has no train split");
    const std::vector<const SourceUnit*> valid_units = corpus.split("valid");

    // Vocabularies from the train split only.
    std::vector<std::vector<std::string>> src_texts;
    std::vector<std::vector<std::string>> tgt_texts;
    for (const SourceUnit* u : train_units) {
        src_texts.push_back(preorder(u->ast).tokens);
        tgt_texts.push_back(tokenize_summary(u->summary));
    }
    Vocabulary vocab_src = Vocabulary::build(src_texts, opts.min_freq);
    Vocabulary vocab_tgt = Vocabulary::build(tgt_texts, opts.min_freq);

    ModelConfig config = base_config;
    config.vocab_src = vocab_src.size();
    config.vocab_tgt = vocab_tgt.size();
    config.validate();

    Model model(config);
    model.init_params(config.seed);

    const std::vector<Batch> valid_batches =
        valid_units.empty()
            ? std::vector<Batch>{}
            : batchify(valid_units, vocab_src, vocab_tgt, config, opts.batch_size);

    std::mt19937_64 shuffle_rng(config.seed);
    TrainResult result{std::move(model), std::move(vocab_src), std::move(vocab_tgt), {}, 0, 0.0, false};

    ParamStore best_params;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        shuffle_units(train_units, shuffle_rng);
        const std::vector<Batch> batches =
            batchify(train_units, result.vocab_src, result.vocab_tgt, config, opts.batch_size);
        const double train_loss = run_split(result.model, batches, true, config.lr);

        double valid_loss = std::numeric_limits<double>::quiet_NaN();
        if (!valid_batches.empty()) {
            valid_loss = run_split(result.model, valid_batches, false, config.lr);
        }
        result.log.push_back({epoch, train_loss, valid_loss});

        const double monitored = valid_batches.empty() ? train_loss : valid_loss;
        if (monitored < best) {
            best = monitored;
            result.best_epoch = epoch;
            best_params = result.model.params();
            since_best = 0;
        } else if (++since_best >= opts.patience) {
            result.stopped_early = true;
            break;
        }
        if (opts.target_train_loss > 0.0 && train_loss <= opts.target_train_loss) {
            result.stopped_early = true;
            break;
        }
    }

    result.best_loss = best;
    result.model.params() = std::move(best_params);
    return result;
}

}  // namespace astsum
