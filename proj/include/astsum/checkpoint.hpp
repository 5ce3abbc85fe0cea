#pragma once

#include <string>

#include "astsum/model.hpp"
#include "astsum/vocab.hpp"

namespace astsum {

// Single-JSON model artifact: {"version":1, "config":{...}, "vocab_src":[...],
// "vocab_tgt":[...], "step":k, "params":{name:{"shape":[...],"data":[...]}}}.
// Parameter names are sorted; save/load round-trips values bit for bit.
// Optimizer moments are not persisted.
void save_checkpoint(const std::string& path, const Model& model, const Vocabulary& vocab_src,
                     const Vocabulary& vocab_tgt);

struct LoadedCheckpoint {
    Model model;
    Vocabulary vocab_src;
    Vocabulary vocab_tgt;
};

// Throws IoError (unreadable), VersionError (wrong/missing version),
// SchemaError (malformed JSON), ShapeMismatchError (missing, extra, or
// misshaped parameter).
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace astsum
