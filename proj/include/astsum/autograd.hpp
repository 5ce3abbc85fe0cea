#pragma once

#include <string>
#include <vector>

#include "astsum/param_store.hpp"
#include "astsum/tensor.hpp"

namespace astsum {

// Reverse-mode tape over Tensor ops. Each builder returns a node id; backward
// walks the nodes in reverse creation order and accumulates parameter
// gradients into the bound ParamStore. One tape per sample; instances are
// independent, so samples can be processed on separate threads.
class Tape {
public:
    explicit Tape(ParamStore* store) : store_(store) {}

    // Constant leaf; receives no gradient.
    int input(Tensor value);
    // Leaf bound to a named store entry; backward adds into its grad.
    int param(const std::string& name);
    // Row gather: out.row(r) = table.row(ids[r]). Throws VocabError on a bad id.
    int embedding(int table, std::vector<int> ids);
    int matmul(int a, int b);
    int add(int a, int b);
    // Broadcast a rank-1 bias over the rows of x.
    int add_row(int x, int bias);
    int relu(int x);
    int layer_norm(int x, int gamma, int beta, double eps = 1e-5);
    // Column-wise concatenation of equal-height matrices.
    int concat_cols(const std::vector<int>& parts);
    // softmax((Q K^T)/sqrt(d_h) + B) V with exact zeros off-mask. When
    // bias_table >= 0, B is gathered from that rank-1 node via bias_index
    // (pad slots contribute 0); otherwise B = 0 and bias_index may be empty.
    int masked_attention(int q, int k, int v, BoolMatrix allow, int bias_table,
                         IntMatrix bias_index);
    // Sum over non-pad positions of -log softmax(logits)[target]; scalar node.
    // Throws AllPadError when nothing is left.
    int cross_entropy_sum(int logits, std::vector<int> targets, int pad_id);

    const Tensor& value(int node) const;
    // Non-pad position count of a cross_entropy_sum node.
    int ce_count(int node) const;

    // Seeds d(loss)/d(node) = seed (node must be scalar) and accumulates
    // parameter gradients into the store. May be called once per tape.
    void backward(int node, double seed);

private:
    enum class Op {
        Input,
        Param,
        Embedding,
        Matmul,
        Add,
        AddRow,
        Relu,
        LayerNorm,
        ConcatCols,
        MaskedAttention,
        CrossEntropySum,
    };

    struct Node {
        Op op;
        std::vector<int> inputs;
        Tensor val;
        // Op payloads (only the relevant ones are set).
        std::string name;          // Param
        std::vector<int> ids;      // Embedding rows / CrossEntropySum targets
        int pad_id = 0;            // CrossEntropySum
        int count = 0;             // CrossEntropySum non-pad positions
        double scale = 1.0;        // MaskedAttention 1/sqrt(d_h)
        double eps = 0.0;          // LayerNorm
        BoolMatrix allow;          // MaskedAttention
        IntMatrix bias_index;      // MaskedAttention
        Tensor p;                  // MaskedAttention softmax / CrossEntropySum probs
        Tensor mean, rstd;         // LayerNorm row stats
        std::vector<int> widths;   // ConcatCols part widths
    };

    int push(Node node);
    const Node& at(int id) const;

    ParamStore* store_;
    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

}  // namespace astsum
