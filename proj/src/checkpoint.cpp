#include "astsum/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "astsum/errors.hpp"

namespace astsum {

namespace {

nlohmann::ordered_json config_to_json(const ModelConfig& c) {
    nlohmann::ordered_json j;
    j["d_model"] = c.d_model;
    j["heads"] = c.heads;
    j["enc_layers"] = c.enc_layers;
    j["dec_layers"] = c.dec_layers;
    j["d_ff"] = c.d_ff;
    j["delta_anc"] = c.delta_anc;
    j["delta_sib"] = c.delta_sib;
    j["vocab_src_size"] = c.vocab_src;
    j["vocab_tgt_size"] = c.vocab_tgt;
    j["max_len"] = c.max_len;
    j["dropout"] = c.dropout;
    j["seed"] = c.seed;
    j["lr"] = c.lr;
    return j;
}

ModelConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("checkpoint config must be an object");
    ModelConfig c;
    try {
        c.d_model = j.at("d_model").get<int>();
        c.heads = j.at("heads").get<int>();
        c.enc_layers = j.at("enc_layers").get<int>();
        c.dec_layers = j.at("dec_layers").get<int>();
        c.d_ff = j.at("d_ff").get<int>();
        c.delta_anc = j.at("delta_anc").get<int>();
        c.delta_sib = j.at("delta_sib").get<int>();
        c.vocab_src = j.at("vocab_src_size").get<int>();
        c.vocab_tgt = j.at("vocab_tgt_size").get<int>();
        c.max_len = j.at("max_len").get<int>();
        c.dropout = j.at("dropout").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.lr = j.at("lr").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint config field: ") + e.what());
    }
    return c;
}

Vocabulary vocab_from_token_array(const nlohmann::json& arr, const char* which) {
    if (!arr.is_array()) throw SchemaError(std::string(which) + " must be a token array");
    nlohmann::json wrapped;
    wrapped["tokens"] = arr;
    try {
        return Vocabulary::from_json(wrapped);
    } catch (const Error& e) {
        throw SchemaError(std::string(which) + ": " + e.what());
    }
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model, const Vocabulary& vocab_src,
                     const Vocabulary& vocab_tgt) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["config"] = config_to_json(model.config());
    j["vocab_src"] = vocab_src.id_to_token;
    j["vocab_tgt"] = vocab_tgt.id_to_token;
    j["step"] = model.params().step();
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    // ParamStore iterates sorted by name, which fixes the file layout.
    for (const auto& [name, entry] : model.params()) {
        nlohmann::ordered_json p;
        p["shape"] = entry.value.shape();
        p["data"] = std::vector<double>(entry.value.flat().begin(), entry.value.flat().end());
        params[name] = std::move(p);
    }
    j["params"] = std::move(params);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed while writing checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("checkpoint is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer()) {
        throw VersionError("checkpoint lacks a version field");
    }
    if (j["version"].get<int>() != 1) {
        throw VersionError("unsupported checkpoint version " + j["version"].dump());
    }
    for (const char* key : {"config", "vocab_src", "vocab_tgt", "params"}) {
        if (!j.contains(key)) throw SchemaError(std::string("checkpoint lacks '") + key + "'");
    }

    const ModelConfig config = config_from_json(j["config"]);
    LoadedCheckpoint loaded{Model(config), vocab_from_token_array(j["vocab_src"], "vocab_src"),
                            vocab_from_token_array(j["vocab_tgt"], "vocab_tgt")};
    if (loaded.vocab_src.size() != config.vocab_src || loaded.vocab_tgt.size() != config.vocab_tgt) {
        throw SchemaError("vocabulary sizes disagree with the checkpoint config");
    }

    // Materialize the expected parameter set, then overwrite from the file.
    loaded.model.init_params(config.seed);
    const nlohmann::json& params = j["params"];
    if (!params.is_object()) throw SchemaError("checkpoint params must be an object");
    for (auto& [name, entry] : loaded.model.params()) {
        auto it = params.find(name);
        if (it == params.end()) throw ShapeMismatchError("checkpoint lacks parameter '" + name + "'");
        const nlohmann::json& p = *it;
        if (!p.contains("shape") || !p.contains("data")) {
            throw SchemaError("parameter '" + name + "' needs shape and data");
        }
        const std::vector<int> shape = p["shape"].get<std::vector<int>>();
        if (shape != entry.value.shape()) {
            throw ShapeMismatchError("parameter '" + name + "' has the wrong shape");
        }
        const std::vector<double> data = p["data"].get<std::vector<double>>();
        if (data.size() != entry.value.numel()) {
            throw ShapeMismatchError("parameter '" + name + "' has the wrong element count");
        }
        std::copy(data.begin(), data.end(), entry.value.flat().begin());
    }
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (!loaded.model.params().has(it.key())) {
            throw ShapeMismatchError("checkpoint carries unknown parameter '" + it.key() + "'");
        }
    }
    loaded.model.params().set_step(j.value("step", 0LL));
    return loaded;
}

}  // namespace astsum
