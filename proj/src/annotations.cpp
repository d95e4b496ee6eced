#include "avact/annotations.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace avact {

using nlohmann::json;
using nlohmann::ordered_json;

bool KeyPointAnnotationSet::positive(int frame, const std::string& instrument) const {
    const auto* kp = keypoints(frame, instrument);
    return kp && !kp->empty();
}

const std::vector<KeyPoint>* KeyPointAnnotationSet::keypoints(int frame, const std::string& instrument) const {
    auto fit = frames.find(frame);
    if (fit == frames.end()) return nullptr;
    auto iit = fit->second.find(instrument);
    if (iit == fit->second.end()) return nullptr;
    return &iit->second;
}

std::vector<int> KeyPointAnnotationSet::frame_indices() const {
    std::vector<int> out;
    out.reserve(frames.size());
    for (const auto& [t, _] : frames) out.push_back(t);
    return out;
}

namespace {
std::vector<KeyPoint> sorted(std::vector<KeyPoint> pts) {
    std::sort(pts.begin(), pts.end());
    return pts;
}
}  // namespace

bool annotations_equal(const KeyPointAnnotationSet& a, const KeyPointAnnotationSet& b) {
    if (a.clip_id != b.clip_id || a.fps != b.fps || a.width != b.width || a.height != b.height) return false;
    if (a.frames.size() != b.frames.size()) return false;
    for (const auto& [t, by_inst] : a.frames) {
        auto bit = b.frames.find(t);
        if (bit == b.frames.end() || bit->second.size() != by_inst.size()) return false;
        for (const auto& [inst, pts] : by_inst) {
            auto pit = bit->second.find(inst);
            if (pit == bit->second.end()) return false;
            if (sorted(pts) != sorted(pit->second)) return false;
        }
    }
    return true;
}

void save_annotations(const KeyPointAnnotationSet& set, const std::filesystem::path& path) {
    ordered_json j;
    j["clip_id"] = set.clip_id;
    j["fps"] = set.fps;
    j["width"] = set.width;
    j["height"] = set.height;
    ordered_json jframes = ordered_json::object();
    for (const auto& [t, by_inst] : set.frames) {
        ordered_json jf = ordered_json::object();
        for (const auto& [inst, pts] : by_inst) {
            ordered_json jp = ordered_json::array();
            for (const auto& p : sorted(pts)) jp.push_back({p[0], p[1]});
            jf[inst] = std::move(jp);
        }
        jframes[std::to_string(t)] = std::move(jf);
    }
    j["frames"] = std::move(jframes);
    std::ofstream os(path);
    if (!os) throw SchemaError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

KeyPointAnnotationSet load_annotations(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    KeyPointAnnotationSet set;
    try {
        set.clip_id = j.at("clip_id").get<std::string>();
        set.fps = j.at("fps").get<double>();
        set.width = j.at("width").get<int>();
        set.height = j.at("height").get<int>();
        if (set.fps <= 0) throw SchemaError("fps must be positive");
        if (set.width <= 0 || set.height <= 0) throw SchemaError("width/height must be positive");
        for (const auto& [tkey, jf] : j.at("frames").items()) {
            int t = 0;
            try {
                std::size_t used = 0;
                t = std::stoi(tkey, &used);
                if (used != tkey.size()) throw std::invalid_argument(tkey);
            } catch (const std::exception&) {
                throw SchemaError("frame key '" + tkey + "' is not an integer");
            }
            if (t < 0) throw SchemaError("negative frame index " + tkey);
            auto& by_inst = set.frames[t];
            for (const auto& [inst, jpts] : jf.items()) {
                std::vector<KeyPoint> pts;
                for (const auto& jp : jpts) {
                    if (!jp.is_array() || jp.size() != 2)
                        throw SchemaError("frame " + tkey + ", instrument '" + inst + "': key point must be [x, y]");
                    KeyPoint p{jp[0].get<float>(), jp[1].get<float>()};
                    if (p[0] < 0 || p[1] < 0 || p[0] > static_cast<float>(set.width - 1) ||
                        p[1] > static_cast<float>(set.height - 1))
                        throw SchemaError("frame " + tkey + ", instrument '" + inst + "': coordinate (" +
                                          std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                                          ") outside " + std::to_string(set.width) + "x" +
                                          std::to_string(set.height) + " frame");
                    pts.push_back(p);
                }
                by_inst[inst] = std::move(pts);
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return set;
}

}  // namespace avact
