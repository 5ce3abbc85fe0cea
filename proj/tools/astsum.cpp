// astsum: parse MiniLang, linearize ASTs, inspect attention relations, train
// the summarizer, decode summaries, evaluate, and benchmark mask sparsity.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "astsum/ast.hpp"
#include "astsum/baseline.hpp"
#include "astsum/checkpoint.hpp"
#include "astsum/corpus.hpp"
#include "astsum/errors.hpp"
#include "astsum/eval.hpp"
#include "astsum/linearize.hpp"
#include "astsum/minilang.hpp"
#include "astsum/model.hpp"
#include "astsum/relations.hpp"
#include "astsum/run_config.hpp"
#include "astsum/trainer.hpp"

namespace {

using namespace astsum;

// Thrown after the diagnostic is already on stderr, to force an exit code.
struct ExitWith {
    int code;
};

std::string read_source(const std::string& in_path) {
    if (in_path.empty()) {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(in_path);
    if (!in) throw IoError("cannot open input file '" + in_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

// Any failure while loading a model artifact is a checkpoint error.
LoadedCheckpoint load_checkpoint_cli(const std::string& path) {
    try {
        return load_checkpoint(path);
    } catch (const Error& e) {
        std::cerr << "astsum: checkpoint: " << e.what() << "\n";
        throw ExitWith{6};
    }
}

struct CommonFlags {
    std::string config_path;
    std::string data;
    std::string out;
    std::string checkpoint;
    std::optional<std::uint64_t> seed;
    std::optional<int> beam;
};

// Config file first, then flag overrides.
RunConfig effective_config(const CommonFlags& flags) {
    RunConfig rc = flags.config_path.empty() ? RunConfig{} : load_run_config(flags.config_path);
    if (!flags.data.empty()) rc.data = flags.data;
    if (!flags.out.empty()) rc.out = flags.out;
    if (!flags.checkpoint.empty()) rc.checkpoint = flags.checkpoint;
    if (flags.seed) rc.model.seed = *flags.seed;
    if (flags.beam) rc.beam = *flags.beam;
    if (rc.beam < 1) throw ConfigError("beam must be >= 1");
    return rc;
}

int cmd_parse(const std::string& in_path) {
    const Ast ast = parse_minilang_source(read_source(in_path));
    std::cout << ast_to_json(ast) << "\n";
    return 0;
}

int cmd_linearize(const std::string& in_path, const std::string& traversal) {
    const Traversal kind = traversal_from_name(traversal);
    const Ast ast = parse_minilang_source(read_source(in_path));
    const LinearSeq seq = kind == Traversal::Pot ? preorder(ast) : sbt(ast);
    nlohmann::ordered_json j;
    j["kind"] = traversal_name(seq.kind);
    j["tokens"] = seq.tokens;
    j["node_ids"] = seq.node_ids;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_relations(const CommonFlags& flags, const std::string& in_path) {
    const RunConfig rc = effective_config(flags);
    const Ast ast = parse_minilang_source(read_source(in_path));
    const LinearSeq seq = preorder(ast);
    const IntMatrix anc = ancestor_matrix(ast, seq);
    const IntMatrix sib = sibling_matrix(ast, seq);

    const auto matrix_json = [](const IntMatrix& m) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int i = 0; i < m.rows; ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int j = 0; j < m.cols; ++j) {
                const int v = m.at(i, j);
                if (v == kNoRelation) row.push_back(nullptr);
                else row.push_back(v);
            }
            rows.push_back(row);
        }
        return rows;
    };

    const std::vector<AttentionPattern> patterns = build_head_masks(anc, sib, rc.model);
    const SparsityReport sparsity = sparsity_report(patterns);

    nlohmann::ordered_json j;
    j["n"] = ast.size();
    j["ancestor"] = matrix_json(anc);
    j["sibling"] = matrix_json(sib);
    nlohmann::ordered_json heads = nlohmann::ordered_json::array();
    for (const HeadSparsity& h : sparsity.per_head) {
        nlohmann::ordered_json row;
        row["head"] = h.head;
        row["relation"] = relation_name(h.relation);
        row["allowed"] = h.allowed;
        heads.push_back(row);
    }
    j["heads"] = heads;
    j["allowed_total"] = sparsity.total;
    j["allowed_ratio"] = sparsity.ratio;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_train(const CommonFlags& flags) {
    const RunConfig rc = effective_config(flags);
    if (rc.data.empty()) throw ConfigError("train needs a corpus: set --data or the config's data field");
    const Corpus corpus = load_corpus_jsonl(rc.data);

    TrainOptions opts;
    opts.epochs = rc.epochs;
    opts.batch_size = rc.batch_size;
    opts.patience = rc.patience;
    opts.min_freq = rc.min_freq;
    opts.target_train_loss = rc.target_train_loss;

    const TrainResult result = train(rc.model, corpus, opts);

    std::error_code ec;
    std::filesystem::create_directories(rc.out, ec);
    if (ec) throw IoError("cannot create output directory '" + rc.out + "': " + ec.message());
    const std::filesystem::path out_dir(rc.out);

    save_checkpoint((out_dir / "checkpoint.json").string(), result.model, result.vocab_src,
                    result.vocab_tgt);
    write_text_file((out_dir / "vocab_src.json").string(), result.vocab_src.to_json().dump(2) + "\n");
    write_text_file((out_dir / "vocab_tgt.json").string(), result.vocab_tgt.to_json().dump(2) + "\n");
    write_text_file((out_dir / "config.json").string(), run_config_to_json(rc).dump(2) + "\n");

    std::ostringstream log;
    for (const EpochLog& e : result.log) {
        nlohmann::ordered_json line;
        line["epoch"] = e.epoch;
        line["train_loss"] = e.train_loss;
        if (std::isnan(e.valid_loss)) line["valid_loss"] = nullptr;
        else line["valid_loss"] = e.valid_loss;
        log << line.dump() << "\n";
    }
    write_text_file((out_dir / "train_log.jsonl").string(), log.str());

    const EpochLog& last = result.log.back();
    std::cout << "epochs run: " << result.log.size() << (result.stopped_early ? " (stopped early)" : "")
              << "\n";
    std::cout << "final train loss: " << last.train_loss << "\n";
    if (!std::isnan(last.valid_loss)) std::cout << "final valid loss: " << last.valid_loss << "\n";
    std::cout << "best epoch: " << result.best_epoch << " (loss " << result.best_loss << ")\n";
    std::cout << "wrote " << (out_dir / "checkpoint.json").string() << "\n";
    return 0;
}

int cmd_summarize(const CommonFlags& flags, const std::string& in_path, const std::string& ast_path) {
    const RunConfig rc = effective_config(flags);
    if (rc.checkpoint.empty())
        throw ConfigError("summarize needs a model: set --checkpoint or the config's checkpoint field");
    const LoadedCheckpoint ckpt = load_checkpoint_cli(rc.checkpoint);

    Ast ast;
    if (!ast_path.empty()) {
        ast = ast_from_json(read_text_file(ast_path));
    } else {
        ast = parse_minilang_source(read_source(in_path));
    }

    const LinearSeq seq = preorder(ast);
    std::vector<int> src_ids;
    src_ids.reserve(seq.tokens.size());
    for (const std::string& tok : seq.tokens) src_ids.push_back(ckpt.vocab_src.id(tok));

    const EncoderOutput enc = ckpt.model.encode(seq, ast, src_ids);
    const std::vector<int> out_ids =
        rc.beam == 1 ? ckpt.model.decode_greedy(enc) : ckpt.model.decode_beam(enc, rc.beam);

    std::vector<std::string> words;
    words.reserve(out_ids.size());
    for (int id : out_ids) words.push_back(ckpt.vocab_tgt.token(id));
    std::cout << join_tokens(words) << "\n";
    return 0;
}

int cmd_eval(const CommonFlags& flags, const std::string& json_path) {
    const RunConfig rc = effective_config(flags);
    if (rc.checkpoint.empty())
        throw ConfigError("eval needs a model: set --checkpoint or the config's checkpoint field");
    if (rc.data.empty()) throw ConfigError("eval needs a corpus: set --data or the config's data field");

    const LoadedCheckpoint ckpt = load_checkpoint_cli(rc.checkpoint);
    const Corpus corpus = load_corpus_jsonl(rc.data);
    const std::vector<const SourceUnit*> units = corpus.split("test");
    if (units.empty()) throw EmptyCorpusError("corpus has no test split");

    const MetricReport report = evaluate(ckpt.model, ckpt.vocab_src, ckpt.vocab_tgt, units, rc.beam);
    std::cout << render_report_text(report, rc.data);

    std::string out_json = json_path;
    if (out_json.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(rc.out, ec);
        if (ec) throw IoError("cannot create output directory '" + rc.out + "': " + ec.message());
        out_json = (std::filesystem::path(rc.out) / "eval.json").string();
    }
    write_text_file(out_json, report_to_json(report, rc.data).dump(2) + "\n");
    return 0;
}

int cmd_bench(const std::string& depths) {
    int min_depth = 0;
    int max_depth = 0;
    const auto dots = depths.find("..");
    try {
        if (dots == std::string::npos) {
            min_depth = max_depth = std::stoi(depths);
        } else {
            min_depth = std::stoi(depths.substr(0, dots));
            max_depth = std::stoi(depths.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw ConfigError("bad depth range '" + depths + "' (expected like 2..6)");
    }
    if (min_depth < 1 || max_depth < min_depth)
        throw ConfigError("bad depth range '" + depths + "' (need 1 <= min <= max)");

    const std::vector<SparsityRow> rows = sparsity_growth(min_depth, max_depth);
    std::cout << "depth,n,n2,ancestor_allowed,sibling_allowed,ancestor_ratio,sibling_ratio\n";
    char buf[64];
    for (const SparsityRow& r : rows) {
        const long long n2 = static_cast<long long>(r.n) * r.n;
        std::cout << r.depth << "," << r.n << "," << n2 << "," << r.ancestor_allowed << ","
                  << r.sibling_allowed << ",";
        std::snprintf(buf, sizeof(buf), "%.6f", r.ancestor_ratio);
        std::cout << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.6f", r.sibling_ratio);
        std::cout << buf << "\n";
    }
    return 0;
}

int run_mapped(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ExitWith& x) {
        return x.code;
    } catch (const LexError& e) {
        std::cerr << "astsum: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "astsum: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "astsum: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "astsum: " << e.what() << "\n";
        return 4;
    } catch (const NonFiniteGradientError& e) {
        std::cerr << "astsum: training failed: " << e.what() << "\n";
        return 1;
    } catch (const NonFiniteError& e) {
        std::cerr << "astsum: training failed: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        // Remaining domain errors are problems with the data itself.
        std::cerr << "astsum: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "astsum: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AST-masked-attention code summarizer"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string in_path;
    std::string ast_path;
    std::string traversal = "pot";
    std::string depths = "2..6";
    std::string json_path;
    std::uint64_t seed_value = 0;
    int beam_value = 0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", flags.config_path, "run config JSON");
        cmd->add_option("--out", flags.out, "output directory");
        cmd->add_option("--seed", seed_value, "override the config seed");
    };

    CLI::App* parse = app.add_subcommand("parse", "MiniLang source to AST JSON");
    parse->add_option("--in", in_path, "source file (stdin when omitted)");
    add_common(parse);

    CLI::App* linearize = app.add_subcommand("linearize", "AST to a token sequence");
    linearize->add_option("--in", in_path, "source file (stdin when omitted)");
    linearize->add_option("--traversal", traversal, "pot|sbt")->default_val("pot");
    add_common(linearize);

    CLI::App* relations = app.add_subcommand("relations", "ancestor/sibling matrices as JSON");
    relations->add_option("--in", in_path, "source file (stdin when omitted)");
    add_common(relations);

    CLI::App* train_cmd = app.add_subcommand("train", "train on a JSONL corpus");
    train_cmd->add_option("--data", flags.data, "corpus JSONL");
    add_common(train_cmd);

    CLI::App* summarize = app.add_subcommand("summarize", "decode a summary for one input");
    summarize->add_option("--checkpoint", flags.checkpoint, "model checkpoint");
    CLI::Option* sum_in = summarize->add_option("--in", in_path, "source file (stdin when omitted)");
    summarize->add_option("--ast", ast_path, "AST JSON file instead of source")->excludes(sum_in);
    summarize->add_option("--beam", beam_value, "beam width (1 = greedy)");
    add_common(summarize);

    CLI::App* eval_cmd = app.add_subcommand("eval", "score the test split against references");
    eval_cmd->add_option("--checkpoint", flags.checkpoint, "model checkpoint");
    eval_cmd->add_option("--data", flags.data, "corpus JSONL");
    eval_cmd->add_option("--json", json_path, "metric JSON path (default <out>/eval.json)");
    eval_cmd->add_option("--beam", beam_value, "beam width (1 = greedy)");
    add_common(eval_cmd);

    CLI::App* bench = app.add_subcommand("bench", "mask sparsity on perfect binary trees, CSV");
    bench->add_option("--depths", depths, "depth range, e.g. 2..6")->default_val("2..6");
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Bad flags are configuration problems; --help stays exit 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 4;
    }

    // Flag-given values override the config file; only flags the user actually
    // passed count, so query the active subcommand after parsing.
    for (CLI::App* cmd : {parse, linearize, relations, train_cmd, summarize, eval_cmd, bench}) {
        if (!cmd->parsed()) continue;
        if (cmd->count("--seed") > 0) flags.seed = seed_value;
        const CLI::Option* beam_opt = cmd->get_option_no_throw("--beam");
        if (beam_opt != nullptr && beam_opt->count() > 0) flags.beam = beam_value;
    }

    return run_mapped([&]() -> int {
        if (parse->parsed()) return cmd_parse(in_path);
        if (linearize->parsed()) return cmd_linearize(in_path, traversal);
        if (relations->parsed()) return cmd_relations(flags, in_path);
        if (train_cmd->parsed()) return cmd_train(flags);
        if (summarize->parsed()) return cmd_summarize(flags, in_path, ast_path);
        if (eval_cmd->parsed()) return cmd_eval(flags, json_path);
        if (bench->parsed()) return cmd_bench(depths);
        return 0;
    });
}
