#pragma once

#include <vector>

#include "astsum/model.hpp"
#include "astsum/relations.hpp"
#include "astsum/tensor.hpp"

namespace astsum::testref {

// Straight-loop forward passes over the same parameters, with masking done
// the classic way: add -1e9 to disallowed logits and softmax the full row.
// No tape, no shared kernels — an independent oracle for the model forward.
Tensor dense_encode(const Model& model, const std::vector<int>& src_ids,
                    const std::vector<AttentionPattern>& patterns);

Tensor dense_decode_logits(const Model& model, const Tensor& enc_states,
                           const std::vector<int>& tgt_in);

}  // namespace astsum::testref
