#include "avact/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace avact {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {
std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (c == '/' || c == '\\') c = '_';
    return out;
}
}  // namespace

void save_checkpoint(const std::vector<StateRef>& state, const CheckpointMeta& meta,
                     const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    ordered_json j;
    j["epoch"] = meta.epoch;
    j["val_clip_auc"] = meta.val_clip_auc;
    j["config_hash"] = meta.config_hash;
    j["rng_state"] = meta.rng_state;
    ordered_json names = ordered_json::array();
    for (const auto& ref : state) {
        ref.value->quantize_to_f32();
        save_tensor(*ref.value, dir / (sanitize(ref.name) + ".tnsr"));
        names.push_back(ref.name);
    }
    j["tensors"] = std::move(names);
    std::ofstream os(dir / "manifest.json");
    if (!os) throw FormatError("cannot write manifest in " + dir.string());
    os << j.dump(2) << '\n';
}

CheckpointMeta read_checkpoint_meta(const std::filesystem::path& dir) {
    std::ifstream is(dir / "manifest.json");
    if (!is) throw FormatError("no manifest.json in " + dir.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw FormatError(dir.string() + "/manifest.json: " + e.what());
    }
    CheckpointMeta meta;
    meta.epoch = j.value("epoch", 0);
    meta.val_clip_auc = j.value("val_clip_auc", 0.0);
    meta.config_hash = j.value("config_hash", "");
    meta.rng_state = j.value("rng_state", "");
    return meta;
}

CheckpointMeta load_checkpoint(std::vector<StateRef> state, const std::filesystem::path& dir) {
    CheckpointMeta meta = read_checkpoint_meta(dir);
    for (auto& ref : state) {
        Tensor t = load_tensor(dir / (sanitize(ref.name) + ".tnsr"));
        if (t.dims() != ref.value->dims())
            throw WeightShapeMismatch(ref.name + " in " + dir.string());
        *ref.value = std::move(t);
    }
    return meta;
}

}  // namespace avact
