#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "avact/nets.hpp"

namespace avact {

struct CheckpointMeta {
    int epoch = 0;
    double val_clip_auc = 0.0;
    std::string config_hash;
    std::string rng_state;
};

// A checkpoint is a directory: manifest.json plus one tensor container
// per named state entry. Params are quantized to float32 before saving
// so that save -> load -> forward is bit-identical with the in-memory
// model.
void save_checkpoint(const std::vector<StateRef>& state, const CheckpointMeta& meta,
                     const std::filesystem::path& dir);

CheckpointMeta load_checkpoint(std::vector<StateRef> state, const std::filesystem::path& dir);
CheckpointMeta read_checkpoint_meta(const std::filesystem::path& dir);

}  // namespace avact
