#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "astsum/config.hpp"
#include "astsum/linearize.hpp"

namespace astsum {

// One JSON artifact describing a run end to end. Vocabulary sizes are never
// configured — they are computed from the training data.
struct RunConfig {
    ModelConfig model;

    std::string data;        // corpus JSONL
    std::string checkpoint;  // model file to load (summarize/eval)
    std::string out = "out"; // output directory for training artifacts

    Traversal traversal = Traversal::Pot;  // linearize only; the model always encodes POT
    int beam = 1;
    int epochs = 100;
    int batch_size = 8;
    int patience = 10;
    int min_freq = 1;
    double target_train_loss = 0.0;  // 0 disables the early exit
};

// Unknown keys are rejected by name; value types are checked.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::ordered_json run_config_to_json(const RunConfig& rc);

}  // namespace astsum
