// End-to-end acceptance checks, one [PASS]/[FAIL] line each. Exit 0 only
// when every criterion holds. Tolerances are pinned here, not configurable.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "astsum/batch.hpp"
#include "astsum/config.hpp"
#include "astsum/corpus.hpp"
#include "astsum/eval.hpp"
#include "astsum/grad_check.hpp"
#include "astsum/linearize.hpp"
#include "astsum/metrics.hpp"
#include "astsum/model.hpp"
#include "astsum/relations.hpp"
#include "astsum/trainer.hpp"
#include "astsum/vocab.hpp"
#include "dense_reference.hpp"
#include "test_util.hpp"

using namespace astsum;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what;
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << "\n";
    if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
    const std::string cmd =
        std::string(ASTSUM_BIN) + " " + args + " > " + stdout_path.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::vector<int> random_ids(int n, int vocab, std::mt19937_64& rng) {
    std::vector<int> ids(n);
    for (int& id : ids) id = 4 + static_cast<int>(rng() % (vocab - 4));
    return ids;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return 1e300;
    double worst = 0.0;
    auto fa = a.flat();
    auto fb = b.flat();
    for (size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, std::fabs(fa[i] - fb[i]));
    return worst;
}

// --- criterion 1: reference rows in the rendered eval report ----------------

void criterion_1() {
    MetricReport dummy;
    dummy.bleu = 0.5;
    dummy.rouge_l = 0.5;
    dummy.meteor = 0.5;
    dummy.samples = 1;
    dummy.beam = 1;
    const std::string text = render_report_text(dummy, "probe");
    const bool java = text.find("AST-MHSA (paper) Java 45.32 32.44 53.28") != std::string::npos;
    const bool python = text.find("AST-MHSA (paper) Python 32.52 20.12 44.23") != std::string::npos;
    const bool label = text.find("paper-reported, not reproduced") != std::string::npos;
    report(1, java && python && label,
           "eval report carries the published numbers as labeled reference rows, not results",
           java && python && label ? "both rows present with the non-reproduction label"
                                   : "missing row or label");
}

// --- criterion 2: sparse/dense oracle equivalence ---------------------------

void criterion_2() {
    const auto start = Clock::now();
    ModelConfig config;
    config.d_model = 8;
    config.heads = 2;
    config.enc_layers = 1;
    config.dec_layers = 1;
    config.d_ff = 16;
    config.delta_anc = 3;
    config.delta_sib = 3;
    config.max_len = 16;
    config.vocab_src = 24;
    config.vocab_tgt = 16;

    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 10);  // N <= 10
        const Ast ast = testutil::random_tree(rng, n);
        Model model(config);
        model.init_params(9000 + trial);

        const LinearSeq seq = preorder(ast);
        const auto src_ids = random_ids(seq.n(), config.vocab_src, rng);
        const auto anc = ancestor_matrix(ast, seq);
        const auto sib = sibling_matrix(ast, seq);
        const auto patterns = build_head_masks(anc, sib, config);

        const EncoderOutput enc = model.encode(seq, ast, src_ids);
        worst = std::max(worst, max_abs_diff(enc.states, testref::dense_encode(model, src_ids, patterns)));

        std::vector<int> tgt_in = random_ids(1 + static_cast<int>(rng() % 6), config.vocab_tgt, rng);
        tgt_in[0] = Vocabulary::kBos;
        worst = std::max(worst,
                         max_abs_diff(model.decode_train_logits(enc, tgt_in),
                                      testref::dense_decode_logits(model, enc.states, tgt_in)));
    }
    const double secs = seconds_since(start);
    report(2, worst <= 1e-9 && secs <= 60.0,
           "encoder and full logits match the dense -1e9 reference on 100 random trees (N<=10)",
           "max |diff| " + fmt(worst) + " (tol 1e-9), " + fmt(secs) + "s (bound 60s)");
}

// --- criterion 3: gradient check on the full loss ---------------------------

void criterion_3() {
    const auto start = Clock::now();
    ModelConfig config;
    config.d_model = 8;
    config.heads = 2;
    config.enc_layers = 1;
    config.dec_layers = 1;
    config.d_ff = 16;
    config.delta_anc = 2;
    config.delta_sib = 2;
    config.max_len = 8;
    config.vocab_src = 12;
    config.vocab_tgt = 12;  // V_tgt <= 16

    std::mt19937_64 rng(77);
    const Ast ast = testutil::random_tree(rng, 5);  // N <= 5

    SourceUnit unit;
    unit.id = "gc";
    unit.summary = "";  // ids assembled by hand below
    unit.ast = ast;
    unit.split = "train";

    Model model(config);
    model.init_params(13);
    // Re-draw the parameters at O(0.4) scale (layer-norm gains near 1). At
    // init scale the attention Q/K gradients on a 5-node tree sit near 1e-10,
    // under the central-difference resolution floor ulp(loss)/(2*eps) ~ 2e-11,
    // so the check would measure float noise instead of gradient correctness.
    std::mt19937_64 prng(10);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * ((prng() >> 11) * 0x1.0p-53);
    };
    for (auto& [name, p] : model.params()) {
        const bool gain = name.find("gamma") != std::string::npos;
        for (double& v : p.value.flat()) v = gain ? 1.0 + uniform(-0.3, 0.3) : uniform(-0.4, 0.4);
    }

    PreparedSample sample;
    sample.unit = &unit;
    const LinearSeq seq = preorder(ast);
    sample.src_ids = random_ids(seq.n(), config.vocab_src, rng);
    sample.patterns =
        build_head_masks(ancestor_matrix(ast, seq), sibling_matrix(ast, seq), config);
    sample.tgt_in = {Vocabulary::kBos, 5, 7, 4};
    sample.tgt_out = {5, 7, 4, Vocabulary::kEos};
    const Batch batch = {sample};

    LossFn f = [&](ParamStore&, bool want_grad) {
        return model.forward_loss(batch, want_grad).loss;
    };
    const double rel = grad_check(f, model.params(), 1e-5);
    const double secs = seconds_since(start);
    report(3, rel <= 1e-4 && secs <= 120.0,
           "grad_check on the full loss (N<=5, V_tgt<=16) stays within 1e-4 at eps=1e-5",
           "max rel err " + fmt(rel) + ", " + fmt(secs) + "s (bound 120s)");
}

// --- criterion 4: 32-pair overfit recipe ------------------------------------

void criterion_4() {
    const auto start = Clock::now();
    const std::string data = std::string(ASTSUM_DATA_DIR) + "/overfit32.jsonl";
    Corpus corpus;
    try {
        corpus = load_corpus_jsonl(data);
    } catch (const std::exception& e) {
        report(4, false, "overfit recipe reaches train BLEU >= 0.95", e.what());
        return;
    }

    ModelConfig config;  // the documented recipe
    config.d_model = 64;
    config.heads = 4;
    config.enc_layers = 2;
    config.dec_layers = 2;
    config.d_ff = 128;
    config.delta_anc = 5;
    config.delta_sib = 5;
    config.max_len = 32;
    config.lr = 1e-3;
    config.seed = 42;

    TrainOptions opts;
    opts.epochs = 300;
    opts.batch_size = 8;
    opts.patience = 300;
    opts.target_train_loss = 0.05;

    const TrainResult r = train(config, corpus, opts);
    const auto train_units = corpus.split("train");
    const MetricReport scores = evaluate(r.model, r.vocab_src, r.vocab_tgt, train_units, 1);
    const double secs = seconds_since(start);
    report(4,
           train_units.size() == 32 && scores.bleu >= 0.95 && r.log.size() <= 300 && secs <= 600.0,
           "32-pair overfit recipe (L=2, d=64, H=4, d_ff=128, delta=5, lr=1e-3, batch 8) reaches "
           "greedy train BLEU >= 0.95 within 300 epochs",
           "BLEU " + fmt(scores.bleu) + " after " + std::to_string(r.log.size()) + " epochs, " +
               fmt(secs) + "s (bound 600s), final train loss " + fmt(r.log.back().train_loss));
}

// --- criterion 5: linearization lengths -------------------------------------

void criterion_5() {
    std::mt19937_64 rng(5);
    long long pot_total = 0, sbt_total = 0;
    bool sizes_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 24);
        const Ast ast = testutil::random_tree(rng, n);
        const LinearSeq pot = preorder(ast);
        const LinearSeq sbt_seq = sbt(ast);
        if (pot.n() != n || sbt_seq.n() != 4 * n) sizes_ok = false;
        pot_total += pot.n();
        sbt_total += sbt_seq.n();
    }
    const double ratio = static_cast<double>(sbt_total) / static_cast<double>(pot_total);
    report(5, sizes_ok && ratio == 4.0,
           "|POT| = N and |SBT| = 4N exactly across 1000 random trees",
           "mean length ratio " + fmt(ratio) + " (exactly 4 required)");
}

// --- criterion 6: relation-matrix oracle ------------------------------------

void criterion_6() {
    std::mt19937_64 rng(6);
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);  // N <= 12
        const Ast ast = testutil::random_tree(rng, n);
        const LinearSeq seq = preorder(ast);
        const IntMatrix a = ancestor_matrix(ast, seq);
        const IntMatrix s = sibling_matrix(ast, seq);

        for (int i = 0; i < n && ok; ++i) {
            for (int j = 0; j < n && ok; ++j) {
                // brute-force ancestor: walk i's parent chain looking for j
                int expect_a = kNoRelation;
                if (i == j) expect_a = 0;
                int cur = i, dist = 0;
                while (expect_a == kNoRelation && ast.nodes[cur].parent) {
                    cur = *ast.nodes[cur].parent;
                    ++dist;
                    if (cur == j) expect_a = dist;
                }
                if (expect_a == kNoRelation) {  // try j under i (descendant)
                    cur = j;
                    dist = 0;
                    while (ast.nodes[cur].parent) {
                        cur = *ast.nodes[cur].parent;
                        ++dist;
                        if (cur == i) {
                            expect_a = -dist;
                            break;
                        }
                    }
                }
                if (a.at(i, j) != expect_a) ok = false;

                // brute-force sibling: shared parent, child-position offset
                int expect_s = kNoRelation;
                if (i == j) {
                    expect_s = 0;
                } else if (ast.nodes[i].parent && ast.nodes[j].parent &&
                           *ast.nodes[i].parent == *ast.nodes[j].parent) {
                    const auto& kids = ast.nodes[*ast.nodes[i].parent].children;
                    int pi = -1, pj = -1;
                    for (size_t k = 0; k < kids.size(); ++k) {
                        if (kids[k] == i) pi = static_cast<int>(k);
                        if (kids[k] == j) pj = static_cast<int>(k);
                    }
                    expect_s = pj - pi;
                }
                if (s.at(i, j) != expect_s) ok = false;
            }
        }
    }
    report(6, ok, "relation matrices agree exactly with brute-force oracles on 200 trees (N<=12)",
           ok ? "all entries equal" : "mismatch found");
}

// --- criterion 7: bench sparsity over perfect binary trees ------------------

void criterion_7() {
    const fs::path out = fs::temp_directory_path() / "acc_bench.csv";
    const int code = run_cli("bench --depths 2..6", out);
    bool ok = (code == 0);
    std::string detail = "exit " + std::to_string(code);

    if (ok) {
        std::istringstream lines(slurp(out));
        std::string line;
        std::getline(lines, line);  // header
        double prev_ratio = 2.0;
        bool decreasing = true, depth3_ok = false;
        int rows = 0;
        while (std::getline(lines, line)) {
            if (line.empty()) continue;
            int depth = 0, n = 0;
            long long n2 = 0, anc = 0, sib = 0;
            double ar = 0.0, sr = 0.0;
            if (std::sscanf(line.c_str(), "%d,%d,%lld,%lld,%lld,%lf,%lf", &depth, &n, &n2, &anc,
                            &sib, &ar, &sr) != 7) {
                decreasing = false;
                break;
            }
            ++rows;
            if (ar >= prev_ratio) decreasing = false;
            prev_ratio = ar;
            if (depth == 3 && n == 7 && anc == 27 && sib == 13) depth3_ok = true;
        }
        ok = decreasing && depth3_ok && rows == 5;
        detail = std::string("ancestor ratio ") + (decreasing ? "strictly decreasing" : "NOT decreasing") +
                 ", depth-3 row " + (depth3_ok ? "= 7/27/13" : "wrong") + ", " +
                 std::to_string(rows) + " rows";
    }
    fs::remove(out);
    report(7, ok, "bench depths 2..6: ancestor allowed/n^2 strictly decreasing, depth-3 = 7/27/13",
           detail);
}

// --- criterion 8: metric pinned values --------------------------------------

void criterion_8() {
    const TokenList abcd = {"a", "b", "c", "d"};
    const TokenList abcde = {"a", "b", "c", "d", "e"};
    const TokenList abc = {"a", "b", "c"};
    const TokenList acd = {"a", "c", "d"};

    const double b = bleu(abcd, abcde);
    const double r = rouge_l(abc, acd);
    const double m = meteor_lite(abc, abc);
    const bool pinned = std::fabs(b - std::exp(-0.25)) <= 1e-6 &&
                        std::fabs(r - 2.0 / 3.0) <= 1e-9 && std::fabs(m - 0.98148) <= 1e-5;
    const bool identity = bleu(abcd, abcd) == 1.0 && rouge_l(abc, abc) == 1.0;
    const bool empties = bleu({}, abc) == 0.0 && bleu(abc, {}) == 0.0 && rouge_l({}, abc) == 0.0 &&
                         meteor_lite({}, abc) == 0.0 && meteor_lite(abc, {}) == 0.0;
    report(8, pinned && identity && empties,
           "bleu = exp(-0.25)±1e-6, rouge_l = 2/3±1e-9, meteor ≈ 0.98148±1e-5, identity/empty exact",
           "bleu " + fmt(b) + ", rouge " + fmt(r) + ", meteor " + fmt(m));
}

// --- criterion 9: end-to-end training determinism ---------------------------

void criterion_9() {
    const fs::path dir = fs::temp_directory_path() / "acc_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const fs::path data = dir / "corpus.jsonl";
    {
        std::ofstream out(data);
        out << R"({"id": "u1", "code": "fn f() { return 1; }", "summary": "returns the number one", "split": "train"})"
            << "\n"
            << R"({"id": "u2", "code": "fn g(a) { return a + 1; }", "summary": "adds one to the input", "split": "train"})"
            << "\n"
            << R"({"id": "u3", "code": "fn h(a, b) { return a * b; }", "summary": "multiplies the two inputs", "split": "train"})"
            << "\n"
            << R"({"id": "v1", "code": "fn k(a) { return a; }", "summary": "echoes the input back", "split": "valid"})"
            << "\n";
    }
    auto config_text = [&](const std::string& out_dir) {
        return std::string("{\"d_model\": 16, \"heads\": 2, \"enc_layers\": 1, \"dec_layers\": 1, "
                           "\"d_ff\": 32, \"delta_anc\": 4, \"delta_sib\": 4, \"max_len\": 16, "
                           "\"lr\": 0.003, \"seed\": 21, \"epochs\": 10, \"batch_size\": 2, "
                           "\"patience\": 10, \"data\": \"") +
               data.string() + "\", \"out\": \"" + out_dir + "\"}";
    };
    const fs::path ca = dir / "ca.json";
    const fs::path cb = dir / "cb.json";
    {
        std::ofstream a(ca);
        a << config_text((dir / "a").string());
        std::ofstream b(cb);
        b << config_text((dir / "b").string());
    }

    const int code_a = run_cli("train --config " + ca.string(), dir / "a.log");
    const int code_b = run_cli("train --config " + cb.string(), dir / "b.log");
    bool ok = (code_a == 0 && code_b == 0);
    std::string detail = "exits " + std::to_string(code_a) + "/" + std::to_string(code_b);
    if (ok) {
        const bool ckpt_same =
            slurp(dir / "a" / "checkpoint.json") == slurp(dir / "b" / "checkpoint.json");
        const bool log_same =
            slurp(dir / "a" / "train_log.jsonl") == slurp(dir / "b" / "train_log.jsonl");
        ok = ckpt_same && log_same && !slurp(dir / "a" / "checkpoint.json").empty();
        detail = std::string("checkpoints ") + (ckpt_same ? "identical" : "DIFFER") + ", logs " +
                 (log_same ? "identical" : "DIFFER");
    }
    fs::remove_all(dir);
    report(9, ok, "two end-to-end train runs with one config+seed are bitwise identical", detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures == 0) {
        std::cout << "all 9 criteria hold\n";
        return 0;
    }
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
}
