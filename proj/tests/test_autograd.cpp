#include <cmath>
#include <random>
#include <vector>

#include "astsum/autograd.hpp"
#include "astsum/errors.hpp"
#include "astsum/grad_check.hpp"
#include "astsum/param_store.hpp"
#include "astsum/tensor.hpp"
#include "doctest.h"

using namespace astsum;

namespace {

Tensor random_tensor(int rows, int cols, std::mt19937_64& rng) {
    Tensor t(rows, cols);
    for (double& x : t.flat()) x = ((rng() >> 11) * 0x1.0p-53) * 0.8 - 0.4;
    return t;
}

Tensor random_vec(int n, std::mt19937_64& rng) {
    Tensor t(n);
    for (double& x : t.flat()) x = ((rng() >> 11) * 0x1.0p-53) * 0.8 - 0.4;
    return t;
}

}  // namespace

TEST_CASE("grad_check agrees with the hand gradient of sum of squares") {
    ParamStore store;
    std::mt19937_64 rng(7);
    store.create("w", random_tensor(2, 3, rng));

    LossFn f = [](ParamStore& s, bool want_grad) {
        auto& e = s.entry("w");
        double loss = 0.0;
        for (double x : e.value.flat()) loss += x * x;
        if (want_grad) {
            auto g = e.grad.flat();
            auto v = e.value.flat();
            for (size_t i = 0; i < v.size(); ++i) g[i] += 2.0 * v[i];
        }
        return loss;
    };
    CHECK(grad_check(f, store) <= 1e-9);
}

TEST_CASE("grad_check flags a deliberately wrong gradient") {
    ParamStore store;
    std::mt19937_64 rng(8);
    store.create("w", random_tensor(2, 2, rng));

    LossFn f = [](ParamStore& s, bool want_grad) {
        auto& e = s.entry("w");
        double loss = 0.0;
        for (double x : e.value.flat()) loss += x * x;
        if (want_grad) {
            auto g = e.grad.flat();
            auto v = e.value.flat();
            for (size_t i = 0; i < v.size(); ++i) g[i] += 3.0 * v[i];  // off by 1.5x
        }
        return loss;
    };
    CHECK(grad_check(f, store) > 1e-3);
}

TEST_CASE("linear layer with bias through cross entropy checks to 1e-6") {
    ParamStore store;
    std::mt19937_64 rng(21);
    store.create("w", random_tensor(4, 3, rng));
    store.create("b", random_vec(3, rng));
    const Tensor x = random_tensor(5, 4, rng);
    // pad id 0: position 2 is skipped by the loss
    const std::vector<int> targets = {1, 2, 0, 1, 2};

    LossFn f = [&](ParamStore& s, bool want_grad) {
        Tape tape(&s);
        const int logits =
            tape.add_row(tape.matmul(tape.input(x), tape.param("w")), tape.param("b"));
        const int loss = tape.cross_entropy_sum(logits, targets, 0);
        if (want_grad) tape.backward(loss, 1.0);
        return tape.value(loss).at(0);
    };
    CHECK(grad_check(f, store) <= 1e-6);
}

TEST_CASE("embedding gather accumulates over repeated ids") {
    ParamStore store;
    std::mt19937_64 rng(22);
    store.create("emb", random_tensor(5, 3, rng));
    store.create("w", random_tensor(3, 4, rng));
    // id 2 appears three times: backward must scatter-add, not overwrite
    const std::vector<int> ids = {2, 2, 0, 4, 2};
    const std::vector<int> targets = {1, 3, 2, 1, 0};

    LossFn f = [&](ParamStore& s, bool want_grad) {
        Tape tape(&s);
        const int h = tape.embedding(tape.param("emb"), ids);
        const int loss = tape.cross_entropy_sum(tape.matmul(h, tape.param("w")), targets, -1);
        if (want_grad) tape.backward(loss, 1.0);
        return tape.value(loss).at(0);
    };
    CHECK(grad_check(f, store) <= 1e-6);
}

TEST_CASE("relu feed-forward stack checks to 1e-4") {
    ParamStore store;
    std::mt19937_64 rng(23);
    store.create("w1", random_tensor(3, 4, rng));
    store.create("w2", random_tensor(4, 3, rng));
    store.create("b2", random_vec(3, rng));
    // bias pushed away from zero so no preactivation sits on the relu kink
    Tensor b1(4);
    b1.at(0) = 0.7;
    b1.at(1) = -0.7;
    b1.at(2) = 0.9;
    b1.at(3) = -0.9;
    store.create("b1", b1);
    const Tensor x = random_tensor(4, 3, rng);
    const std::vector<int> targets = {0, 2, 1, 2};

    LossFn f = [&](ParamStore& s, bool want_grad) {
        Tape tape(&s);
        const int pre =
            tape.add_row(tape.matmul(tape.input(x), tape.param("w1")), tape.param("b1"));
        const int logits =
            tape.add_row(tape.matmul(tape.relu(pre), tape.param("w2")), tape.param("b2"));
        const int loss = tape.cross_entropy_sum(logits, targets, -1);
        if (want_grad) tape.backward(loss, 1.0);
        return tape.value(loss).at(0);
    };
    CHECK(grad_check(f, store) <= 1e-4);
}

TEST_CASE("layer norm gradient covers x, gamma and beta") {
    ParamStore store;
    std::mt19937_64 rng(24);
    store.create("x", random_tensor(3, 4, rng));
    Tensor gamma = random_vec(4, rng);
    for (double& g : gamma.flat()) g += 1.0;
    store.create("gamma", gamma);
    store.create("beta", random_vec(4, rng));
    store.create("w", random_tensor(4, 3, rng));
    const std::vector<int> targets = {2, 0, 1};

    LossFn f = [&](ParamStore& s, bool want_grad) {
        Tape tape(&s);
        const int h = tape.layer_norm(tape.param("x"), tape.param("gamma"), tape.param("beta"));
        const int loss = tape.cross_entropy_sum(tape.matmul(h, tape.param("w")), targets, -1);
        if (want_grad) tape.backward(loss, 1.0);
        return tape.value(loss).at(0);
    };
    CHECK(grad_check(f, store) <= 1e-4);
}

TEST_CASE("two-head masked attention with a bias table checks to 1e-4") {
    ParamStore store;
    std::mt19937_64 rng(25);
    store.create("x", random_tensor(3, 4, rng));
    for (const char* name : {"wq0", "wk0", "wv0", "wq1", "wk1", "wv1"}) {
        store.create(name, random_tensor(4, 2, rng));
    }
    store.create("wo", random_tensor(4, 3, rng));
    store.create("table", random_vec(4, rng));  // delta=1: 3 offsets + self slot

    // diagonal plus a few off-diagonal pairs; disallowed slots carry the
    // out-of-range pad index 4 and must never be read
    BoolMatrix allow(3, 3, false);
    IntMatrix bias_index(3, 3, 4);
    for (int i = 0; i < 3; ++i) {
        allow.set(i, i, true);
        bias_index.at(i, i) = 3;
    }
    allow.set(0, 1, true);
    bias_index.at(0, 1) = 2;
    allow.set(1, 0, true);
    bias_index.at(1, 0) = 0;
    allow.set(2, 0, true);
    bias_index.at(2, 0) = 0;
    const std::vector<int> targets = {1, 0, 2};

    LossFn f = [&](ParamStore& s, bool want_grad) {
        Tape tape(&s);
        const int x = tape.param("x");
        const int table = tape.param("table");
        std::vector<int> heads;
        for (int h = 0; h < 2; ++h) {
            const std::string suf = std::to_string(h);
            const int q = tape.matmul(x, tape.param("wq" + suf));
            const int k = tape.matmul(x, tape.param("wk" + suf));
            const int v = tape.matmul(x, tape.param("wv" + suf));
            heads.push_back(tape.masked_attention(q, k, v, allow, table, bias_index));
        }
        const int cat = tape.concat_cols(heads);
        const int loss = tape.cross_entropy_sum(tape.matmul(cat, tape.param("wo")), targets, -1);
        if (want_grad) tape.backward(loss, 1.0);
        return tape.value(loss).at(0);
    };
    CHECK(grad_check(f, store) <= 1e-4);
}

TEST_CASE("residual add routes gradient down both branches") {
    ParamStore store;
    std::mt19937_64 rng(26);
    store.create("x", random_tensor(2, 3, rng));
    store.create("w", random_tensor(3, 3, rng));
    const std::vector<int> targets = {1, 2};

    LossFn f = [&](ParamStore& s, bool want_grad) {
        Tape tape(&s);
        const int x = tape.param("x");
        const int logits = tape.add(x, tape.matmul(x, tape.param("w")));
        const int loss = tape.cross_entropy_sum(logits, targets, -1);
        if (want_grad) tape.backward(loss, 1.0);
        return tape.value(loss).at(0);
    };
    CHECK(grad_check(f, store) <= 1e-4);
}

TEST_CASE("a parameter shared by two branches accumulates both gradients") {
    ParamStore store;
    std::mt19937_64 rng(27);
    store.create("w", random_tensor(3, 3, rng));
    const Tensor a = random_tensor(2, 3, rng);
    const Tensor b = random_tensor(2, 3, rng);
    const std::vector<int> targets = {0, 2};

    LossFn f = [&](ParamStore& s, bool want_grad) {
        Tape tape(&s);
        const int w = tape.param("w");
        const int logits = tape.add(tape.matmul(tape.input(a), w), tape.matmul(tape.input(b), w));
        const int loss = tape.cross_entropy_sum(logits, targets, -1);
        if (want_grad) tape.backward(loss, 1.0);
        return tape.value(loss).at(0);
    };
    CHECK(grad_check(f, store) <= 1e-6);
}

TEST_CASE("cross entropy gradient of raw logits is softmax minus one-hot") {
    ParamStore store;
    Tensor w(1, 3);
    w.at(0, 0) = 0.2;
    w.at(0, 1) = -0.1;
    w.at(0, 2) = 0.4;
    store.create("w", w);

    Tape tape(&store);
    const int loss = tape.cross_entropy_sum(tape.param("w"), {2}, -1);
    const double z = std::exp(0.2) + std::exp(-0.1) + std::exp(0.4);
    CHECK(tape.value(loss).at(0) == doctest::Approx(-std::log(std::exp(0.4) / z)).epsilon(1e-12));
    CHECK(tape.ce_count(loss) == 1);

    tape.backward(loss, 1.0);
    const Tensor& g = store.entry("w").grad;
    CHECK(g.at(0, 0) == doctest::Approx(std::exp(0.2) / z).epsilon(1e-12));
    CHECK(g.at(0, 1) == doctest::Approx(std::exp(-0.1) / z).epsilon(1e-12));
    CHECK(g.at(0, 2) == doctest::Approx(std::exp(0.4) / z - 1.0).epsilon(1e-12));
}

TEST_CASE("ce_count and the loss value skip pad positions") {
    ParamStore store;
    std::mt19937_64 rng(30);
    store.create("w", random_tensor(3, 4, rng));

    Tape tape(&store);
    const int loss = tape.cross_entropy_sum(tape.param("w"), {1, 0, 3}, 0);
    CHECK(tape.ce_count(loss) == 2);

    // same logits with the middle row dropped by hand
    const Tensor& w = store.entry("w").value;
    Tensor two(2, 4);
    for (int j = 0; j < 4; ++j) {
        two.at(0, j) = w.at(0, j);
        two.at(1, j) = w.at(2, j);
    }
    Tape ref(&store);
    const int ref_loss = ref.cross_entropy_sum(ref.input(two), {1, 3}, -1);
    CHECK(tape.value(loss).at(0) == doctest::Approx(ref.value(ref_loss).at(0)).epsilon(1e-12));
}

TEST_CASE("all-pad targets throw") {
    ParamStore store;
    std::mt19937_64 rng(31);
    store.create("w", random_tensor(2, 3, rng));
    Tape tape(&store);
    CHECK_THROWS_AS(tape.cross_entropy_sum(tape.param("w"), {0, 0}, 0), AllPadError);
}

TEST_CASE("embedding rejects an id outside the table") {
    ParamStore store;
    std::mt19937_64 rng(32);
    store.create("emb", random_tensor(4, 3, rng));
    Tape tape(&store);
    const int table = tape.param("emb");
    CHECK_THROWS_AS(tape.embedding(table, {0, 4}), VocabError);
    CHECK_THROWS_AS(tape.embedding(table, {-1}), VocabError);
}

TEST_CASE("backward runs once per tape") {
    ParamStore store;
    std::mt19937_64 rng(33);
    store.create("w", random_tensor(2, 2, rng));
    Tape tape(&store);
    const int loss = tape.cross_entropy_sum(tape.param("w"), {0, 1}, -1);
    tape.backward(loss, 1.0);
    CHECK_THROWS_AS(tape.backward(loss, 1.0), Error);
}

TEST_CASE("backward seed scales parameter gradients linearly") {
    ParamStore store;
    std::mt19937_64 rng(34);
    const Tensor init = random_tensor(2, 3, rng);
    store.create("w", init);

    auto grad_with_seed = [&](double seed) {
        store.zero_grads();
        Tape tape(&store);
        const int loss = tape.cross_entropy_sum(tape.param("w"), {1, 2}, -1);
        tape.backward(loss, seed);
        return store.entry("w").grad;
    };
    const Tensor g1 = grad_with_seed(1.0);
    const Tensor g2 = grad_with_seed(0.5);
    for (size_t i = 0; i < g1.numel(); ++i) {
        CHECK(g2.flat()[i] == doctest::Approx(0.5 * g1.flat()[i]).epsilon(1e-12));
    }
}
