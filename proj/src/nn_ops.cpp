#include "astsum/nn_ops.hpp"

#include <cmath>
#include <string>

#include "astsum/errors.hpp"
#include "astsum/kernels.hpp"

namespace astsum {

Tensor masked_attention(const Tensor& q, const Tensor& k, const Tensor& v, const BoolMatrix& allow,
                        const Tensor& bias) {
    const int n = q.rows();
    const int d_h = q.cols();
    const int n_kv = k.rows();
    if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2) throw ShapeError("attention inputs must be matrices");
    if (k.cols() != d_h) throw ShapeError("Q and K widths differ");
    if (v.rows() != n_kv) throw ShapeError("K and V row counts differ");
    if (allow.rows != n || allow.cols != n_kv) throw ShapeError("allow mask shape mismatch");
    if (bias.rows() != n || bias.cols() != n_kv) throw ShapeError("bias shape mismatch");
    if (d_h < 1) throw ShapeError("attention head width must be >= 1");

    Tensor s(n, n_kv);
    kern::matmul_nt(q.flat(), k.flat(), s.flat(), n, d_h, n_kv);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_h));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n_kv; ++j) {
            s.at(i, j) = s.at(i, j) * scale + bias.at(i, j);
        }
    }
    const int bad = kern::softmax_masked_rows(s.flat(), {allow.data.data(), allow.data.size()}, n, n_kv);
    if (bad >= 0) {
        throw EmptyRowError("attention row " + std::to_string(bad) + " has no allowed keys");
    }
    Tensor out(n, v.cols());
    kern::matmul(s.flat(), v.flat(), out.flat(), n, n_kv, v.cols());
    return out;
}

Tensor feed_forward(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2,
                    const Tensor& b2) {
    const int n = x.rows();
    const int d = x.cols();
    const int d_ff = w1.cols();
    if (w1.rows() != d) throw ShapeError("W1 rows must match input width");
    if (static_cast<int>(b1.numel()) != d_ff) throw ShapeError("b1 length must match W1 cols");
    if (w2.rows() != d_ff || w2.cols() != d) throw ShapeError("W2 must map d_ff back to input width");
    if (static_cast<int>(b2.numel()) != d) throw ShapeError("b2 length must match output width");

    Tensor h(n, d_ff);
    kern::matmul(x.flat(), w1.flat(), h.flat(), n, d, d_ff);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d_ff; ++j) {
            const double z = h.at(i, j) + b1.at(j);
            h.at(i, j) = z > 0.0 ? z : 0.0;
        }
    }
    Tensor out(n, d);
    kern::matmul(h.flat(), w2.flat(), out.flat(), n, d_ff, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) out.at(i, j) += b2.at(j);
    }
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
    const int n = x.rows();
    const int d = x.cols();
    if (d < 1) throw ShapeError("layer_norm needs at least one column");
    if (static_cast<int>(gamma.numel()) != d || static_cast<int>(beta.numel()) != d) {
        throw ShapeError("gamma/beta length must match row width");
    }
    Tensor out(n, d);
    kern::layer_norm_rows(x.flat(), gamma.flat(), beta.flat(), out.flat(), {}, {}, n, d, eps);
    return out;
}

CrossEntropyResult cross_entropy(const Tensor& logits, const std::vector<int>& targets, int pad_id) {
    const int n = logits.rows();
    const int v = logits.cols();
    if (static_cast<int>(targets.size()) != n) throw ShapeError("one target per logit row required");
    CrossEntropyResult res;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const int t = targets[i];
        if (t == pad_id) continue;
        if (t < 0 || t >= v) throw ShapeError("target id " + std::to_string(t) + " outside vocabulary");
        auto row = logits.row(i);
        double mx = row[0];
        for (double x : row) mx = std::max(mx, x);
        double z = 0.0;
        for (double x : row) z += std::exp(x - mx);
        total += -(row[t] - mx - std::log(z));
        res.count += 1;
    }
    if (res.count == 0) throw AllPadError("every target position is padding");
    res.loss = total / res.count;
    return res;
}

}  // namespace astsum
