#include "astsum/autograd.hpp"

#include <cmath>
#include <utility>

#include "astsum/errors.hpp"
#include "astsum/kernels.hpp"

namespace astsum {

namespace {

Tensor zeros_like(const Tensor& t) {
    return t.rank() == 2 ? Tensor(t.rows(), t.cols()) : Tensor(static_cast<int>(t.numel()));
}

void require_matrix(const Tensor& t, const char* what) {
    if (t.rank() != 2) throw ShapeError(std::string(what) + " must be a matrix");
}

}  // namespace

int Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

const Tape::Node& Tape::at(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) throw ShapeError("tape node id out of range");
    return nodes_[id];
}

const Tensor& Tape::value(int node) const { return at(node).val; }

int Tape::ce_count(int node) const {
    const Node& n = at(node);
    if (n.op != Op::CrossEntropySum) throw ShapeError("ce_count applies to cross_entropy_sum nodes");
    return n.count;
}

int Tape::input(Tensor value) {
    Node n;
    n.op = Op::Input;
    n.val = std::move(value);
    return push(std::move(n));
}

int Tape::param(const std::string& name) {
    Node n;
    n.op = Op::Param;
    n.name = name;
    n.val = store_->entry(name).value;
    return push(std::move(n));
}

int Tape::embedding(int table, std::vector<int> ids) {
    const Tensor& tab = at(table).val;
    require_matrix(tab, "embedding table");
    Tensor out(static_cast<int>(ids.size()), tab.cols());
    for (size_t r = 0; r < ids.size(); ++r) {
        const int id = ids[r];
        if (id < 0 || id >= tab.rows()) {
            throw VocabError("embedding id " + std::to_string(id) + " outside table of " +
                             std::to_string(tab.rows()) + " rows");
        }
        auto src = tab.row(id);
        auto dst = out.row(static_cast<int>(r));
        std::copy(src.begin(), src.end(), dst.begin());
    }
    Node n;
    n.op = Op::Embedding;
    n.inputs = {table};
    n.ids = std::move(ids);
    n.val = std::move(out);
    return push(std::move(n));
}

int Tape::matmul(int a, int b) {
    const Tensor& ta = at(a).val;
    const Tensor& tb = at(b).val;
    require_matrix(ta, "matmul lhs");
    require_matrix(tb, "matmul rhs");
    if (ta.cols() != tb.rows()) throw ShapeError("matmul inner dimensions differ");
    Tensor out(ta.rows(), tb.cols());
    kern::matmul(ta.flat(), tb.flat(), out.flat(), ta.rows(), ta.cols(), tb.cols());
    Node n;
    n.op = Op::Matmul;
    n.inputs = {a, b};
    n.val = std::move(out);
    return push(std::move(n));
}

int Tape::add(int a, int b) {
    const Tensor& ta = at(a).val;
    const Tensor& tb = at(b).val;
    if (!ta.same_shape(tb)) throw ShapeError("add operands must have equal shapes");
    Tensor out = ta;
    auto dst = out.flat();
    auto src = tb.flat();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    Node n;
    n.op = Op::Add;
    n.inputs = {a, b};
    n.val = std::move(out);
    return push(std::move(n));
}

int Tape::add_row(int x, int bias) {
    const Tensor& tx = at(x).val;
    const Tensor& tb = at(bias).val;
    require_matrix(tx, "add_row input");
    if (tb.rank() != 1 || static_cast<int>(tb.numel()) != tx.cols()) {
        throw ShapeError("add_row bias must be rank-1 of the row width");
    }
    Tensor out = tx;
    for (int i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (int j = 0; j < out.cols(); ++j) row[j] += tb.at(j);
    }
    Node n;
    n.op = Op::AddRow;
    n.inputs = {x, bias};
    n.val = std::move(out);
    return push(std::move(n));
}

int Tape::relu(int x) {
    Tensor out = at(x).val;
    for (double& v : out.flat()) v = v > 0.0 ? v : 0.0;
    Node n;
    n.op = Op::Relu;
    n.inputs = {x};
    n.val = std::move(out);
    return push(std::move(n));
}

int Tape::layer_norm(int x, int gamma, int beta, double eps) {
    const Tensor& tx = at(x).val;
    const Tensor& tg = at(gamma).val;
    const Tensor& tb = at(beta).val;
    require_matrix(tx, "layer_norm input");
    if (static_cast<int>(tg.numel()) != tx.cols() || static_cast<int>(tb.numel()) != tx.cols()) {
        throw ShapeError("layer_norm gamma/beta must match the row width");
    }
    Node n;
    n.op = Op::LayerNorm;
    n.inputs = {x, gamma, beta};
    n.eps = eps;
    n.val = Tensor(tx.rows(), tx.cols());
    n.mean = Tensor(tx.rows());
    n.rstd = Tensor(tx.rows());
    kern::layer_norm_rows(tx.flat(), tg.flat(), tb.flat(), n.val.flat(), n.mean.flat(),
                          n.rstd.flat(), tx.rows(), tx.cols(), eps);
    return push(std::move(n));
}

int Tape::concat_cols(const std::vector<int>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols needs at least one part");
    const int rows = at(parts[0]).val.rows();
    int total = 0;
    std::vector<int> widths;
    for (int p : parts) {
        const Tensor& t = at(p).val;
        require_matrix(t, "concat_cols part");
        if (t.rows() != rows) throw ShapeError("concat_cols parts must share the row count");
        widths.push_back(t.cols());
        total += t.cols();
    }
    Tensor out(rows, total);
    int off = 0;
    for (size_t pi = 0; pi < parts.size(); ++pi) {
        const Tensor& t = at(parts[pi]).val;
        for (int i = 0; i < rows; ++i) {
            auto src = t.row(i);
            auto dst = out.row(i);
            std::copy(src.begin(), src.end(), dst.begin() + off);
        }
        off += widths[pi];
    }
    Node n;
    n.op = Op::ConcatCols;
    n.inputs = parts;
    n.widths = std::move(widths);
    n.val = std::move(out);
    return push(std::move(n));
}

int Tape::masked_attention(int q, int k, int v, BoolMatrix allow, int bias_table,
                           IntMatrix bias_index) {
    const Tensor& tq = at(q).val;
    const Tensor& tk = at(k).val;
    const Tensor& tv = at(v).val;
    require_matrix(tq, "attention Q");
    require_matrix(tk, "attention K");
    require_matrix(tv, "attention V");
    const int n = tq.rows();
    const int d_h = tq.cols();
    const int n_kv = tk.rows();
    if (tk.cols() != d_h) throw ShapeError("Q and K widths differ");
    if (tv.rows() != n_kv) throw ShapeError("K and V row counts differ");
    if (allow.rows != n || allow.cols != n_kv) throw ShapeError("allow mask shape mismatch");

    Node node;
    node.op = Op::MaskedAttention;
    node.inputs = {q, k, v};
    node.scale = 1.0 / std::sqrt(static_cast<double>(d_h));
    if (bias_table >= 0) {
        const Tensor& table = at(bias_table).val;
        if (table.rank() != 1) throw ShapeError("bias table must be rank-1");
        if (bias_index.rows != n || bias_index.cols != n_kv) {
            throw ShapeError("bias_index shape mismatch");
        }
        node.inputs.push_back(bias_table);
    }

    Tensor s(n, n_kv);
    kern::matmul_nt(tq.flat(), tk.flat(), s.flat(), n, d_h, n_kv);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n_kv; ++j) s.at(i, j) *= node.scale;
    }
    if (bias_table >= 0) {
        const Tensor& table = at(bias_table).val;
        const int tsize = static_cast<int>(table.numel());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n_kv; ++j) {
                if (!allow.at(i, j)) continue;
                const int idx = bias_index.at(i, j);
                if (idx < 0 || idx >= tsize) {
                    throw ShapeError("bias index " + std::to_string(idx) + " outside table of " +
                                     std::to_string(tsize) + " entries");
                }
                s.at(i, j) += table.at(idx);
            }
        }
    }
    const int bad = kern::softmax_masked_rows(s.flat(), {allow.data.data(), allow.data.size()}, n, n_kv);
    if (bad >= 0) throw EmptyRowError("attention row " + std::to_string(bad) + " has no allowed keys");
    node.p = s;  // softmax weights, needed for backward
    Tensor out(n, tv.cols());
    kern::matmul(s.flat(), tv.flat(), out.flat(), n, n_kv, tv.cols());
    node.val = std::move(out);
    node.allow = std::move(allow);
    node.bias_index = std::move(bias_index);
    return push(std::move(node));
}

int Tape::cross_entropy_sum(int logits, std::vector<int> targets, int pad_id) {
    const Tensor& t = at(logits).val;
    require_matrix(t, "cross entropy logits");
    if (static_cast<int>(targets.size()) != t.rows()) {
        throw ShapeError("one target per logit row required");
    }
    Node node;
    node.op = Op::CrossEntropySum;
    node.inputs = {logits};
    node.pad_id = pad_id;
    node.p = Tensor(t.rows(), t.cols());
    double total = 0.0;
    for (int i = 0; i < t.rows(); ++i) {
        const int tgt = targets[i];
        if (tgt == pad_id) continue;
        if (tgt < 0 || tgt >= t.cols()) {
            throw ShapeError("target id " + std::to_string(tgt) + " outside vocabulary");
        }
        auto row = t.row(i);
        double mx = row[0];
        for (double x : row) mx = std::max(mx, x);
        double z = 0.0;
        for (double x : row) z += std::exp(x - mx);
        auto prow = node.p.row(i);
        for (int j = 0; j < t.cols(); ++j) prow[j] = std::exp(row[j] - mx) / z;
        total += -(row[tgt] - mx - std::log(z));
        node.count += 1;
    }
    if (node.count == 0) throw AllPadError("every target position is padding");
    node.ids = std::move(targets);
    Tensor val(1);
    val.at(0) = total;
    node.val = std::move(val);
    return push(std::move(node));
}

void Tape::backward(int node, double seed) {
    if (backward_done_) throw ShapeError("backward may run once per tape");
    backward_done_ = true;
    if (at(node).val.numel() != 1) throw ShapeError("backward needs a scalar loss node");

    std::vector<Tensor> grads(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) grads[i] = zeros_like(nodes_[i].val);
    grads[node].at(0) = seed;

    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
        const Node& n = nodes_[id];
        const Tensor& g = grads[id];
        switch (n.op) {
            case Op::Input:
                break;
            case Op::Param: {
                ParamEntry& e = store_->entry(n.name);
                auto dst = e.grad.flat();
                auto src = g.flat();
                if (dst.size() != src.size()) throw ShapeError("parameter grad shape drifted");
                for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
                break;
            }
            case Op::Embedding: {
                Tensor& gt = grads[n.inputs[0]];
                for (size_t r = 0; r < n.ids.size(); ++r) {
                    auto src = g.row(static_cast<int>(r));
                    auto dst = gt.row(n.ids[r]);
                    for (size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
                }
                break;
            }
            case Op::Matmul: {
                const Tensor& a = nodes_[n.inputs[0]].val;
                const Tensor& b = nodes_[n.inputs[1]].val;
                Tensor da(a.rows(), a.cols());
                Tensor db(b.rows(), b.cols());
                kern::matmul_nt(g.flat(), b.flat(), da.flat(), g.rows(), g.cols(), b.rows());
                kern::matmul_tn(a.flat(), g.flat(), db.flat(), a.rows(), a.cols(), g.cols());
                auto acc = [](Tensor& into, const Tensor& from) {
                    auto d = into.flat();
                    auto s = from.flat();
                    for (size_t i = 0; i < d.size(); ++i) d[i] += s[i];
                };
                acc(grads[n.inputs[0]], da);
                acc(grads[n.inputs[1]], db);
                break;
            }
            case Op::Add: {
                for (int which = 0; which < 2; ++which) {
                    auto dst = grads[n.inputs[which]].flat();
                    auto src = g.flat();
                    for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
                }
                break;
            }
            case Op::AddRow: {
                auto dx = grads[n.inputs[0]].flat();
                auto src = g.flat();
                for (size_t i = 0; i < dx.size(); ++i) dx[i] += src[i];
                Tensor& db = grads[n.inputs[1]];
                for (int i = 0; i < g.rows(); ++i) {
                    auto row = g.row(i);
                    for (int j = 0; j < g.cols(); ++j) db.at(j) += row[j];
                }
                break;
            }
            case Op::Relu: {
                const Tensor& x = nodes_[n.inputs[0]].val;
                auto dst = grads[n.inputs[0]].flat();
                auto xs = x.flat();
                auto gs = g.flat();
                for (size_t i = 0; i < dst.size(); ++i) dst[i] += xs[i] > 0.0 ? gs[i] : 0.0;
                break;
            }
            case Op::LayerNorm: {
                const Tensor& x = nodes_[n.inputs[0]].val;
                const Tensor& gamma = nodes_[n.inputs[1]].val;
                Tensor& dx = grads[n.inputs[0]];
                Tensor& dgamma = grads[n.inputs[1]];
                Tensor& dbeta = grads[n.inputs[2]];
                const int rows = x.rows();
                const int cols = x.cols();
                for (int i = 0; i < rows; ++i) {
                    const double mu = n.mean.at(i);
                    const double r = n.rstd.at(i);
                    auto xrow = x.row(i);
                    auto grow = g.row(i);
                    auto dxrow = dx.row(i);
                    double m1 = 0.0, m2 = 0.0;
                    for (int j = 0; j < cols; ++j) {
                        const double xhat = (xrow[j] - mu) * r;
                        const double u = grow[j] * gamma.at(j);
                        dgamma.at(j) += grow[j] * xhat;
                        dbeta.at(j) += grow[j];
                        m1 += u;
                        m2 += u * xhat;
                    }
                    m1 /= cols;
                    m2 /= cols;
                    for (int j = 0; j < cols; ++j) {
                        const double xhat = (xrow[j] - mu) * r;
                        const double u = grow[j] * gamma.at(j);
                        dxrow[j] += r * (u - m1 - xhat * m2);
                    }
                }
                break;
            }
            case Op::ConcatCols: {
                int off = 0;
                for (size_t pi = 0; pi < n.inputs.size(); ++pi) {
                    Tensor& dp = grads[n.inputs[pi]];
                    for (int i = 0; i < g.rows(); ++i) {
                        auto src = g.row(i);
                        auto dst = dp.row(i);
                        for (int j = 0; j < n.widths[pi]; ++j) dst[j] += src[off + j];
                    }
                    off += n.widths[pi];
                }
                break;
            }
            case Op::MaskedAttention: {
                const Tensor& q = nodes_[n.inputs[0]].val;
                const Tensor& k = nodes_[n.inputs[1]].val;
                const Tensor& v = nodes_[n.inputs[2]].val;
                const int rows = n.p.rows();
                const int cols = n.p.cols();
                Tensor dp(rows, cols);
                kern::matmul_nt(g.flat(), v.flat(), dp.flat(), rows, g.cols(), cols);
                Tensor dv(v.rows(), v.cols());
                kern::matmul_tn(n.p.flat(), g.flat(), dv.flat(), rows, cols, g.cols());
                // Softmax backward, row-local: dS = P (dP - sum(dP p))
                Tensor ds(rows, cols);
                for (int i = 0; i < rows; ++i) {
                    auto prow = n.p.row(i);
                    auto dprow = dp.row(i);
                    double dot = 0.0;
                    for (int j = 0; j < cols; ++j) dot += dprow[j] * prow[j];
                    auto dsrow = ds.row(i);
                    for (int j = 0; j < cols; ++j) dsrow[j] = prow[j] * (dprow[j] - dot);
                }
                Tensor dq(q.rows(), q.cols());
                Tensor dk(k.rows(), k.cols());
                kern::matmul(ds.flat(), k.flat(), dq.flat(), rows, cols, k.cols());
                kern::matmul_tn(ds.flat(), q.flat(), dk.flat(), rows, cols, q.cols());
                auto acc_scaled = [](Tensor& into, const Tensor& from, double s) {
                    auto d = into.flat();
                    auto f = from.flat();
                    for (size_t i = 0; i < d.size(); ++i) d[i] += f[i] * s;
                };
                acc_scaled(grads[n.inputs[0]], dq, n.scale);
                acc_scaled(grads[n.inputs[1]], dk, n.scale);
                acc_scaled(grads[n.inputs[2]], dv, 1.0);
                if (n.inputs.size() == 4) {
                    Tensor& dtable = grads[n.inputs[3]];
                    for (int i = 0; i < rows; ++i) {
                        auto dsrow = ds.row(i);
                        for (int j = 0; j < cols; ++j) {
                            if (n.allow.at(i, j)) dtable.at(n.bias_index.at(i, j)) += dsrow[j];
                        }
                    }
                }
                break;
            }
            case Op::CrossEntropySum: {
                const double s = g.at(0);
                Tensor& dl = grads[n.inputs[0]];
                for (int i = 0; i < n.p.rows(); ++i) {
                    const int tgt = n.ids[i];
                    if (tgt == n.pad_id) continue;
                    auto prow = n.p.row(i);
                    auto drow = dl.row(i);
                    for (int j = 0; j < n.p.cols(); ++j) drow[j] += s * prow[j];
                    drow[tgt] -= s;
                }
                break;
            }
        }
    }
}

}  // namespace astsum
