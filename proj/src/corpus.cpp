#include "avact/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "avact/wav.hpp"

namespace avact {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {
std::string frame_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05zu.png", i);
    return buf;
}
}  // namespace

void save_clip(const VideoClip& clip, const InstrumentVocabulary& vocab,
               const std::filesystem::path& corpus_root) {
    const auto dir = corpus_root / "clips" / clip.clip_id;
    std::filesystem::create_directories(dir / "frames");
    ordered_json j;
    j["clip_id"] = clip.clip_id;
    j["frame_fps"] = clip.frame_fps;
    ordered_json tags = ordered_json::array();
    for (std::size_t g = 0; g < clip.tags.size(); ++g)
        if (clip.tags.positive(g)) tags.push_back(vocab.name(g));
    j["tags"] = std::move(tags);
    std::ofstream os(dir / "clip.json");
    if (!os) throw FormatError("cannot write " + (dir / "clip.json").string());
    os << j.dump(2) << '\n';
    for (std::size_t i = 0; i < clip.frames.size(); ++i)
        save_image(clip.frames[i], (dir / "frames" / frame_name(i)).string());
    save_wav(clip.audio, kSampleRate, dir / "audio.wav");
}

VideoClip load_clip(const std::filesystem::path& corpus_root, const std::string& clip_id,
                    const InstrumentVocabulary& vocab) {
    const auto dir = corpus_root / "clips" / clip_id;
    std::ifstream is(dir / "clip.json");
    if (!is) throw FormatError("no clip.json in " + dir.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw SchemaError(dir.string() + "/clip.json: " + e.what());
    }
    VideoClip clip;
    clip.clip_id = j.at("clip_id").get<std::string>();
    clip.frame_fps = j.at("frame_fps").get<double>();
    clip.tags.v.assign(vocab.size(), 0);
    for (const auto& t : j.at("tags")) {
        const int g = vocab.index_of(t.get<std::string>());
        if (g < 0) throw SchemaError("unknown tag '" + t.get<std::string>() + "' in " + clip_id);
        clip.tags.v[static_cast<std::size_t>(g)] = 1;
    }
    std::vector<std::filesystem::path> frame_paths;
    for (const auto& e : std::filesystem::directory_iterator(dir / "frames"))
        if (e.path().extension() == ".png") frame_paths.push_back(e.path());
    std::sort(frame_paths.begin(), frame_paths.end());
    for (const auto& p : frame_paths) clip.frames.push_back(load_image(p.string()));
    int sr = 0;
    clip.audio = load_wav(dir / "audio.wav", sr);
    if (sr != kSampleRate)
        throw FormatError(clip_id + ": audio must be 16 kHz, got " + std::to_string(sr));
    return clip;
}

std::vector<std::string> list_clips(const std::filesystem::path& corpus_root) {
    std::vector<std::string> ids;
    const auto clips = corpus_root / "clips";
    if (!std::filesystem::is_directory(clips)) throw FormatError("no clips/ under " + corpus_root.string());
    for (const auto& e : std::filesystem::directory_iterator(clips))
        if (e.is_directory()) ids.push_back(e.path().filename().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace avact
