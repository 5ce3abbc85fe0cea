#include "astsum/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "astsum/errors.hpp"

namespace astsum {

namespace {

// mt19937_64 output mapped to [0,1) by hand; the standard distributions are
// implementation-defined, which would break cross-compiler determinism.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string enc_prefix(int layer) { return "enc.l" + std::to_string(layer) + "."; }
std::string dec_prefix(int layer) { return "dec.l" + std::to_string(layer) + "."; }

// Log-softmax of one row, written for reuse by greedy/beam scoring.
std::vector<double> log_softmax_row(std::span<const double> row) {
    double mx = row[0];
    for (double x : row) mx = std::max(mx, x);
    double z = 0.0;
    for (double x : row) z += std::exp(x - mx);
    const double lz = std::log(z);
    std::vector<double> out(row.size());
    for (size_t j = 0; j < row.size(); ++j) out[j] = row[j] - mx - lz;
    return out;
}

}  // namespace

Model::Model(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
}

void Model::init_params(std::uint64_t seed) {
    if (params_.size() != 0) throw ConfigError("parameters already initialized");
    std::mt19937_64 rng(seed);
    auto uniform_matrix = [&](int rows, int cols) {
        Tensor t(rows, cols);
        for (double& v : t.flat()) v = next_uniform(rng) * 0.16 - 0.08;
        return t;
    };
    auto zeros_vec = [](int n) { return Tensor(n); };
    auto ones_vec = [](int n) {
        Tensor t(n);
        t.fill(1.0);
        return t;
    };

    const int d = config_.d_model;
    const int dh = config_.head_dim();

    // Creation order fixes the RNG draw order; keep it stable.
    params_.create("src_embed", uniform_matrix(config_.vocab_src, d));
    params_.create("tgt_embed", uniform_matrix(config_.vocab_tgt, d));
    params_.create("pos_embed", uniform_matrix(config_.max_len, d));
    params_.create("bias.anc", zeros_vec(2 * config_.delta_anc + 2));
    params_.create("bias.sib", zeros_vec(2 * config_.delta_sib + 2));

    auto attention_block = [&](const std::string& prefix) {
        for (int h = 0; h < config_.heads; ++h) {
            const std::string hp = prefix + "h" + std::to_string(h) + ".";
            params_.create(hp + "wq", uniform_matrix(d, dh));
            params_.create(hp + "wk", uniform_matrix(d, dh));
            params_.create(hp + "wv", uniform_matrix(d, dh));
        }
        params_.create(prefix + "wo", uniform_matrix(d, d));
        params_.create(prefix + "bo", zeros_vec(d));
    };
    auto norm_block = [&](const std::string& prefix) {
        params_.create(prefix + "gamma", ones_vec(d));
        params_.create(prefix + "beta", zeros_vec(d));
    };
    auto ff_block = [&](const std::string& prefix) {
        params_.create(prefix + "w1", uniform_matrix(d, config_.d_ff));
        params_.create(prefix + "b1", zeros_vec(config_.d_ff));
        params_.create(prefix + "w2", uniform_matrix(config_.d_ff, d));
        params_.create(prefix + "b2", zeros_vec(d));
    };

    for (int l = 0; l < config_.enc_layers; ++l) {
        const std::string p = enc_prefix(l);
        attention_block(p + "attn.");
        norm_block(p + "ln1.");
        ff_block(p + "ff.");
        norm_block(p + "ln2.");
    }
    for (int l = 0; l < config_.dec_layers; ++l) {
        const std::string p = dec_prefix(l);
        attention_block(p + "self.");
        norm_block(p + "ln1.");
        attention_block(p + "cross.");
        norm_block(p + "ln2.");
        ff_block(p + "ff.");
        norm_block(p + "ln3.");
    }
    params_.create("out.w", uniform_matrix(d, config_.vocab_tgt));
    params_.create("out.b", zeros_vec(config_.vocab_tgt));
}

int Model::build_encoder(Tape& tape, const std::vector<int>& src_ids,
                         const std::vector<AttentionPattern>& patterns) const {
    if (src_ids.empty()) throw EmptyInputError("encoder input must hold at least one token");
    if (static_cast<int>(patterns.size()) != config_.heads) {
        throw ShapeError("one attention pattern per head required");
    }
    const int anc_table = tape.param("bias.anc");
    const int sib_table = tape.param("bias.sib");

    int x = tape.embedding(tape.param("src_embed"), src_ids);
    for (int l = 0; l < config_.enc_layers; ++l) {
        const std::string p = enc_prefix(l);
        std::vector<int> heads;
        for (int h = 0; h < config_.heads; ++h) {
            const std::string hp = p + "attn.h" + std::to_string(h) + ".";
            const int q = tape.matmul(x, tape.param(hp + "wq"));
            const int k = tape.matmul(x, tape.param(hp + "wk"));
            const int v = tape.matmul(x, tape.param(hp + "wv"));
            const AttentionPattern& pat = patterns[h];
            const int table = pat.relation == Relation::Ancestor ? anc_table : sib_table;
            heads.push_back(tape.masked_attention(q, k, v, pat.allow, table, pat.bias_index));
        }
        const int proj = tape.add_row(tape.matmul(tape.concat_cols(heads), tape.param(p + "attn.wo")),
                                      tape.param(p + "attn.bo"));
        x = tape.layer_norm(tape.add(x, proj), tape.param(p + "ln1.gamma"), tape.param(p + "ln1.beta"));
        const int h1 = tape.relu(tape.add_row(tape.matmul(x, tape.param(p + "ff.w1")),
                                              tape.param(p + "ff.b1")));
        const int ff = tape.add_row(tape.matmul(h1, tape.param(p + "ff.w2")), tape.param(p + "ff.b2"));
        x = tape.layer_norm(tape.add(x, ff), tape.param(p + "ln2.gamma"), tape.param(p + "ln2.beta"));
    }
    return x;
}

int Model::build_decoder_logits(Tape& tape, int enc_states, const std::vector<int>& tgt_in) const {
    const int m = static_cast<int>(tgt_in.size());
    if (m < 1) throw LengthError("decoder input must hold at least BOS");
    if (m > config_.max_len) {
        throw LengthError("decoder input of " + std::to_string(m) + " exceeds max_len " +
                          std::to_string(config_.max_len));
    }
    const int n_enc = tape.value(enc_states).rows();

    std::vector<int> pos_ids(m);
    for (int i = 0; i < m; ++i) pos_ids[i] = i;
    int y = tape.add(tape.embedding(tape.param("tgt_embed"), tgt_in),
                     tape.embedding(tape.param("pos_embed"), pos_ids));

    BoolMatrix causal(m, m, false);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) causal.set(i, j, true);
    }
    BoolMatrix full(m, n_enc, true);

    auto attention = [&](const std::string& prefix, int q_src, int kv_src, const BoolMatrix& allow) {
        std::vector<int> heads;
        for (int h = 0; h < config_.heads; ++h) {
            const std::string hp = prefix + "h" + std::to_string(h) + ".";
            const int q = tape.matmul(q_src, tape.param(hp + "wq"));
            const int k = tape.matmul(kv_src, tape.param(hp + "wk"));
            const int v = tape.matmul(kv_src, tape.param(hp + "wv"));
            heads.push_back(tape.masked_attention(q, k, v, allow, -1, IntMatrix()));
        }
        return tape.add_row(tape.matmul(tape.concat_cols(heads), tape.param(prefix + "wo")),
                            tape.param(prefix + "bo"));
    };

    for (int l = 0; l < config_.dec_layers; ++l) {
        const std::string p = dec_prefix(l);
        int self = attention(p + "self.", y, y, causal);
        y = tape.layer_norm(tape.add(y, self), tape.param(p + "ln1.gamma"), tape.param(p + "ln1.beta"));
        int cross = attention(p + "cross.", y, enc_states, full);
        y = tape.layer_norm(tape.add(y, cross), tape.param(p + "ln2.gamma"), tape.param(p + "ln2.beta"));
        const int h1 = tape.relu(tape.add_row(tape.matmul(y, tape.param(p + "ff.w1")),
                                              tape.param(p + "ff.b1")));
        const int ff = tape.add_row(tape.matmul(h1, tape.param(p + "ff.w2")), tape.param(p + "ff.b2"));
        y = tape.layer_norm(tape.add(y, ff), tape.param(p + "ln3.gamma"), tape.param(p + "ln3.beta"));
    }
    return tape.add_row(tape.matmul(y, tape.param("out.w")), tape.param("out.b"));
}

EncoderOutput Model::encode(const LinearSeq& seq, const Ast& ast,
                            const std::vector<int>& src_ids) const {
    EncoderOutput out;
    out.patterns = build_head_masks(ancestor_matrix(ast, seq), sibling_matrix(ast, seq), config_);
    Tape tape(const_cast<ParamStore*>(&params_));
    out.states = tape.value(build_encoder(tape, src_ids, out.patterns));
    return out;
}

Tensor Model::decode_train_logits(const EncoderOutput& enc, const std::vector<int>& tgt_in) const {
    Tape tape(const_cast<ParamStore*>(&params_));
    const int states = tape.input(enc.states);
    return tape.value(build_decoder_logits(tape, states, tgt_in));
}

Model::LossResult Model::forward_loss(const Batch& batch, bool want_grad) {
    if (batch.empty()) throw EmptyInputError("forward_loss needs a nonempty batch");
    if (want_grad) params_.zero_grads();

    std::vector<Tape> tapes;
    tapes.reserve(batch.size());
    std::vector<int> loss_nodes;
    double total = 0.0;
    long long count = 0;
    for (const PreparedSample& s : batch) {
        Tape& tape = tapes.emplace_back(&params_);
        const int enc = build_encoder(tape, s.src_ids, s.patterns);
        const int logits = build_decoder_logits(tape, enc, s.tgt_in);
        const int loss = tape.cross_entropy_sum(logits, s.tgt_out, Vocabulary::kPad);
        loss_nodes.push_back(loss);
        total += tape.value(loss).at(0);
        count += tape.ce_count(loss);
    }
    // count >= batch size: every sample's tgt_out carries at least EOS.
    if (want_grad) {
        const double seed = 1.0 / static_cast<double>(count);
        for (size_t i = 0; i < tapes.size(); ++i) tapes[i].backward(loss_nodes[i], seed);
    }
    LossResult res;
    res.loss = total / static_cast<double>(count);
    res.tokens = static_cast<int>(count);
    return res;
}

std::vector<int> Model::decode_greedy(const EncoderOutput& enc) const {
    return greedy_scored(enc).tokens;
}

Model::Scored Model::greedy_scored(const EncoderOutput& enc) const {
    Scored hyp;
    std::vector<int> prefix{Vocabulary::kBos};
    while (static_cast<int>(prefix.size()) < config_.max_len) {
        const Tensor logits = decode_train_logits(enc, prefix);
        auto row = logits.row(logits.rows() - 1);
        int best = 0;
        for (int j = 1; j < static_cast<int>(row.size()); ++j) {
            if (row[j] > row[best]) best = j;  // ties keep the lowest id
        }
        hyp.logp += log_softmax_row(row)[best];
        hyp.steps += 1;
        if (best == Vocabulary::kEos) return hyp;
        hyp.tokens.push_back(best);
        prefix.push_back(best);
    }
    return hyp;
}

std::vector<int> Model::decode_beam(const EncoderOutput& enc, int beam_width) const {
    if (beam_width < 1) throw ConfigError("beam width must be >= 1");

    struct Cand {
        int hyp;
        int token;
        double logit;   // raw, for within-hyp ranking
        double cum;     // cumulative log-probability
    };
    std::vector<Scored> live{Scored{}};
    std::vector<Scored> finished;

    while (!live.empty()) {
        // The prefix (BOS + tokens) may grow to max_len; hypotheses at the
        // cap retire as they are, everything else keeps expanding.
        std::vector<Scored> expandable;
        for (Scored& h : live) {
            if (1 + static_cast<int>(h.tokens.size()) >= config_.max_len) {
                finished.push_back(std::move(h));
            } else {
                expandable.push_back(std::move(h));
            }
        }
        live = std::move(expandable);
        if (live.empty()) break;

        std::vector<Cand> pool;
        for (size_t hi = 0; hi < live.size(); ++hi) {
            const Scored& h = live[hi];
            std::vector<int> prefix{Vocabulary::kBos};
            prefix.insert(prefix.end(), h.tokens.begin(), h.tokens.end());
            const Tensor logits = decode_train_logits(enc, prefix);
            auto row = logits.row(logits.rows() - 1);
            const std::vector<double> logprobs = log_softmax_row(row);

            // Within one hypothesis rank by raw logits (id breaks ties) so a
            // width-1 beam retraces greedy decisions bit for bit.
            std::vector<int> order(row.size());
            for (size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (row[a] != row[b]) return row[a] > row[b];
                return a < b;
            });
            const int take = std::min<int>(beam_width, static_cast<int>(order.size()));
            for (int r = 0; r < take; ++r) {
                pool.push_back({static_cast<int>(hi), order[r], row[order[r]],
                                h.logp + logprobs[order[r]]});
            }
        }
        std::sort(pool.begin(), pool.end(), [&](const Cand& a, const Cand& b) {
            if (a.cum != b.cum) return a.cum > b.cum;
            if (a.token != b.token) return a.token < b.token;
            return a.hyp < b.hyp;
        });

        // Exactly beam_width selections per step; an EOS selection retires
        // its hypothesis instead of keeping it live. (With width 1 an EOS
        // pick therefore ends the search, matching greedy.)
        std::vector<Scored> next;
        int consumed = 0;
        for (const Cand& c : pool) {
            if (consumed >= beam_width) break;
            ++consumed;
            Scored h = live[c.hyp];
            h.logp = c.cum;
            h.steps += 1;
            if (c.token == Vocabulary::kEos) {
                finished.push_back(std::move(h));
            } else {
                h.tokens.push_back(c.token);
                next.push_back(std::move(h));
            }
        }
        live = std::move(next);
    }
    for (Scored& h : live) finished.push_back(std::move(h));

    const Scored greedy = greedy_scored(enc);
    const Scored* best = &greedy;
    for (const Scored& h : finished) {
        if (h.normalized() > best->normalized()) best = &h;
    }
    return best->tokens;
}

}  // namespace astsum
