#pragma once

#include <string>
#include <vector>

namespace astsum {

using TokenList = std::vector<std::string>;

// Sentence BLEU-4: clipped n-gram precisions, geometric mean, brevity
// penalty. A zero precision for n >= 2 is smoothed to 1/(2*count_n); a zero
// unigram precision (or empty candidate) gives 0.
double bleu(const TokenList& candidate, const TokenList& reference);

// LCS F-measure with beta = 1.2. 0 when either side is empty or the LCS is.
double rouge_l(const TokenList& candidate, const TokenList& reference);

// Exact-match unigram alignment chosen greedily to minimize chunk count;
// harmonic mean with alpha = 0.9, fragmentation penalty 0.5 * (chunks/m)^3.
double meteor_lite(const TokenList& candidate, const TokenList& reference);

// Longest common subsequence length (exposed for the metric tests).
int lcs_length(const TokenList& a, const TokenList& b);

}  // namespace astsum
