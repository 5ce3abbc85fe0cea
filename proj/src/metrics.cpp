#include "astsum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace astsum {

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const TokenList& toks, int n) {
    std::map<std::vector<std::string>, int> counts;
    if (static_cast<int>(toks.size()) < n) return counts;
    for (size_t i = 0; i + n <= toks.size(); ++i) {
        counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)] += 1;
    }
    return counts;
}

}  // namespace

double bleu(const TokenList& candidate, const TokenList& reference) {
    const int c = static_cast<int>(candidate.size());
    const int r = static_cast<int>(reference.size());
    if (c == 0) return 0.0;

    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const auto cand = ngram_counts(candidate, n);
        const auto ref = ngram_counts(reference, n);
        long long total = std::max(0, c - n + 1);
        long long matched = 0;
        for (const auto& [gram, count] : cand) {
            auto it = ref.find(gram);
            if (it != ref.end()) matched += std::min<long long>(count, it->second);
        }
        double p;
        if (matched > 0) {
            p = static_cast<double>(matched) / static_cast<double>(total);
        } else if (n == 1) {
            return 0.0;  // nothing in common at all
        } else {
            // Smoothing for short or miss-heavy candidates; total can be 0
            // when the candidate is shorter than n.
            p = 1.0 / (2.0 * static_cast<double>(std::max<long long>(1, total)));
        }
        log_sum += std::log(p);
    }
    const double geo = std::exp(log_sum / 4.0);
    const double bp = c < r ? std::exp(1.0 - static_cast<double>(r) / c) : 1.0;
    return bp * geo;
}

int lcs_length(const TokenList& a, const TokenList& b) {
    const size_t n = a.size();
    const size_t m = b.size();
    std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double rouge_l(const TokenList& candidate, const TokenList& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const int l = lcs_length(candidate, reference);
    if (l == 0) return 0.0;
    const double p = static_cast<double>(l) / candidate.size();
    const double r = static_cast<double>(l) / reference.size();
    constexpr double kBeta = 1.2;
    const double b2 = kBeta * kBeta;
    return (1.0 + b2) * p * r / (r + b2 * p);
}

double meteor_lite(const TokenList& candidate, const TokenList& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;

    // Available reference positions per token.
    std::map<std::string, std::vector<int>> positions;
    for (int j = 0; j < static_cast<int>(reference.size()); ++j) {
        positions[reference[j]].push_back(j);
    }
    std::vector<bool> used(reference.size(), false);

    int m = 0;
    int chunks = 0;
    int prev_cand = -2;  // candidate index of the previous match
    int prev_ref = -2;
    for (int i = 0; i < static_cast<int>(candidate.size()); ++i) {
        auto it = positions.find(candidate[i]);
        if (it == positions.end()) continue;
        int pick = -1;
        // Prefer the reference position that keeps the current chunk going.
        if (i == prev_cand + 1 && prev_ref + 1 < static_cast<int>(reference.size()) &&
            !used[prev_ref + 1] && reference[prev_ref + 1] == candidate[i]) {
            pick = prev_ref + 1;
        } else {
            for (int j : it->second) {
                if (!used[j]) {
                    pick = j;
                    break;
                }
            }
        }
        if (pick < 0) continue;
        used[pick] = true;
        if (!(i == prev_cand + 1 && pick == prev_ref + 1)) ++chunks;
        prev_cand = i;
        prev_ref = pick;
        ++m;
    }
    if (m == 0) return 0.0;

    const double p = static_cast<double>(m) / candidate.size();
    const double r = static_cast<double>(m) / reference.size();
    constexpr double kAlpha = 0.9;
    const double f = p * r / (kAlpha * p + (1.0 - kAlpha) * r);
    const double frag = static_cast<double>(chunks) / m;
    const double penalty = 0.5 * frag * frag * frag;
    return f * (1.0 - penalty);
}

}  // namespace astsum
