#pragma once

#include <cstdint>

namespace astsum {

// Hyperparameters shared by the encoder, decoder, and training loop.
// validate() enforces the structural constraints; everything downstream
// assumes a validated config.
struct ModelConfig {
    int d_model = 64;
    int heads = 4;       // even; first half ancestor heads, second half sibling heads
    int enc_layers = 2;
    int dec_layers = 2;
    int d_ff = 128;
    int delta_anc = 5;   // ancestor-distance threshold
    int delta_sib = 5;   // sibling-offset threshold
    int vocab_src = 0;   // set after vocabularies are built
    int vocab_tgt = 0;
    int max_len = 32;    // decode cap, including EOS
    double dropout = 0.0;
    std::uint64_t seed = 42;
    double lr = 1e-3;

    int head_dim() const { return d_model / heads; }

    // Throws ConfigError. `with_vocabs` additionally requires vocab sizes > 0
    // (they are legitimately unset before corpus loading).
    void validate(bool with_vocabs = true) const;
};

}  // namespace astsum
