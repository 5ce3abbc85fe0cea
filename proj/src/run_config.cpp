#include "astsum/run_config.hpp"

#include <fstream>

#include "astsum/errors.hpp"

namespace astsum {

namespace {

int as_int(const std::string& key, const nlohmann::json& v) {
    if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
    return v.get<int>();
}

double as_double(const std::string& key, const nlohmann::json& v) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t as_seed(const std::string& key, const nlohmann::json& v) {
    if (!v.is_number_unsigned())  // negative integers parse as signed
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string as_string(const std::string& key, const nlohmann::json& v) {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig rc;
    for (const auto& [key, value] : j.items()) {
        if (key == "d_model") rc.model.d_model = as_int(key, value);
        else if (key == "heads") rc.model.heads = as_int(key, value);
        else if (key == "enc_layers") rc.model.enc_layers = as_int(key, value);
        else if (key == "dec_layers") rc.model.dec_layers = as_int(key, value);
        else if (key == "d_ff") rc.model.d_ff = as_int(key, value);
        else if (key == "delta_anc") rc.model.delta_anc = as_int(key, value);
        else if (key == "delta_sib") rc.model.delta_sib = as_int(key, value);
        else if (key == "max_len") rc.model.max_len = as_int(key, value);
        else if (key == "dropout") rc.model.dropout = as_double(key, value);
        else if (key == "seed") rc.model.seed = as_seed(key, value);
        else if (key == "lr") rc.model.lr = as_double(key, value);
        else if (key == "data") rc.data = as_string(key, value);
        else if (key == "checkpoint") rc.checkpoint = as_string(key, value);
        else if (key == "out") rc.out = as_string(key, value);
        else if (key == "traversal") rc.traversal = traversal_from_name(as_string(key, value));
        else if (key == "beam") rc.beam = as_int(key, value);
        else if (key == "epochs") rc.epochs = as_int(key, value);
        else if (key == "batch_size") rc.batch_size = as_int(key, value);
        else if (key == "patience") rc.patience = as_int(key, value);
        else if (key == "min_freq") rc.min_freq = as_int(key, value);
        else if (key == "target_train_loss") rc.target_train_loss = as_double(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    rc.model.validate(false);
    if (rc.beam < 1) throw ConfigError("beam must be >= 1");
    if (rc.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (rc.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (rc.patience < 1) throw ConfigError("patience must be >= 1");
    if (rc.min_freq < 1) throw ConfigError("min_freq must be >= 1");
    if (rc.target_train_loss < 0.0) throw ConfigError("target_train_loss must be >= 0");
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + std::string(e.what()));
    }
    return run_config_from_json(j);
}

nlohmann::ordered_json run_config_to_json(const RunConfig& rc) {
    nlohmann::ordered_json j;
    j["d_model"] = rc.model.d_model;
    j["heads"] = rc.model.heads;
    j["enc_layers"] = rc.model.enc_layers;
    j["dec_layers"] = rc.model.dec_layers;
    j["d_ff"] = rc.model.d_ff;
    j["delta_anc"] = rc.model.delta_anc;
    j["delta_sib"] = rc.model.delta_sib;
    j["max_len"] = rc.model.max_len;
    j["dropout"] = rc.model.dropout;
    j["seed"] = rc.model.seed;
    j["lr"] = rc.model.lr;
    j["data"] = rc.data;
    j["checkpoint"] = rc.checkpoint;
    j["out"] = rc.out;
    j["traversal"] = traversal_name(rc.traversal);
    j["beam"] = rc.beam;
    j["epochs"] = rc.epochs;
    j["batch_size"] = rc.batch_size;
    j["patience"] = rc.patience;
    j["min_freq"] = rc.min_freq;
    j["target_train_loss"] = rc.target_train_loss;
    return j;
}

}  // namespace astsum
