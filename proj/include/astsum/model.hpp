#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "astsum/ast.hpp"
#include "astsum/autograd.hpp"
#include "astsum/batch.hpp"
#include "astsum/config.hpp"
#include "astsum/linearize.hpp"
#include "astsum/param_store.hpp"
#include "astsum/relations.hpp"

namespace astsum {

struct EncoderOutput {
    Tensor states;  // n x d_model
    std::vector<AttentionPattern> patterns;
};

// Relationship-masked encoder + causal decoder with cross-attention.
// The encoder has no absolute positions: tree structure enters only through
// the per-head masks and the relative-distance bias tables. The decoder uses
// learned absolute positions.
class Model {
public:
    explicit Model(ModelConfig config);

    const ModelConfig& config() const { return config_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    // Seeded uniform(-0.08, 0.08) for embeddings and weights, zeros for
    // biases and bias tables, ones for layer-norm gains. Same seed, same
    // store, bit for bit.
    void init_params(std::uint64_t seed);

    // Tape builders, exposed so training, decoding, and the equivalence tests
    // share one forward definition. Both return the output node id.
    int build_encoder(Tape& tape, const std::vector<int>& src_ids,
                      const std::vector<AttentionPattern>& patterns) const;
    int build_decoder_logits(Tape& tape, int enc_states, const std::vector<int>& tgt_in) const;

    EncoderOutput encode(const LinearSeq& seq, const Ast& ast,
                         const std::vector<int>& src_ids) const;
    Tensor decode_train_logits(const EncoderOutput& enc, const std::vector<int>& tgt_in) const;

    struct LossResult {
        double loss = 0.0;  // mean over the batch's non-pad target positions
        int tokens = 0;
    };
    // Teacher-forced loss over a batch; when want_grad, accumulates gradients
    // (store grads are zeroed first).
    LossResult forward_loss(const Batch& batch, bool want_grad);

    // Content token ids (no BOS/EOS). Ties break toward the lowest id.
    std::vector<int> decode_greedy(const EncoderOutput& enc) const;
    // Length-normalized beam search; never scores below the greedy result.
    std::vector<int> decode_beam(const EncoderOutput& enc, int beam_width) const;

private:
    struct Scored {
        std::vector<int> tokens;
        double logp = 0.0;
        int steps = 0;
        double normalized() const { return logp / std::max(1, steps); }
    };
    Scored greedy_scored(const EncoderOutput& enc) const;

    ModelConfig config_;
    ParamStore params_;
};

}  // namespace astsum
