#include "astsum/config.hpp"

#include <string>

#include "astsum/errors.hpp"

namespace astsum {

void ModelConfig::validate(bool with_vocabs) const {
    if (heads < 1 || heads % 2 != 0) {
        throw ConfigError("heads must be a positive even number, got " + std::to_string(heads));
    }
    if (d_model < 1 || d_model % heads != 0) {
        throw ConfigError("d_model (" + std::to_string(d_model) + ") must be a positive multiple of heads (" +
                          std::to_string(heads) + ")");
    }
    if (enc_layers < 1) throw ConfigError("enc_layers must be >= 1");
    if (dec_layers < 1) throw ConfigError("dec_layers must be >= 1");
    if (d_ff < 1) throw ConfigError("d_ff must be >= 1");
    if (delta_anc < 1) throw ConfigError("delta_anc must be >= 1");
    if (delta_sib < 1) throw ConfigError("delta_sib must be >= 1");
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (lr < 0.0) throw ConfigError("lr must be >= 0");
    if (with_vocabs) {
        if (vocab_src < 5) throw ConfigError("vocab_src must cover the 4 specials plus content");
        if (vocab_tgt < 5) throw ConfigError("vocab_tgt must cover the 4 specials plus content");
    }
}

}  // namespace astsum
