#pragma once

#include <vector>

#include "astsum/tensor.hpp"

namespace astsum {

// Scaled dot-product attention restricted to the allowed pairs:
// softmax((Q K^T)/sqrt(d_h) + bias) V, with weights exactly 0 where
// allow is false. Throws EmptyRowError if a query row allows no key,
// ShapeError on non-conforming shapes.
Tensor masked_attention(const Tensor& q, const Tensor& k, const Tensor& v, const BoolMatrix& allow,
                        const Tensor& bias);

// ReLU(x W1 + b1) W2 + b2. b1/b2 are rank-1 and broadcast over rows.
Tensor feed_forward(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2,
                    const Tensor& b2);

// Row-wise (x - mean)/sqrt(var + eps) * gamma + beta with population variance.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

struct CrossEntropyResult {
    double loss = 0.0;  // mean over non-pad positions
    int count = 0;      // non-pad positions used
};

// Mean -log softmax(logits)[target] over positions whose target is not
// pad_id. Throws AllPadError when every position is padding.
CrossEntropyResult cross_entropy(const Tensor& logits, const std::vector<int>& targets, int pad_id);

}  // namespace astsum
