#include "avact/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "avact/annotations.hpp"
#include "avact/mel.hpp"

namespace avact::pipeline {

namespace {

std::string sub_name(int sub) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", sub);
    return buf;
}

Tensor frames_to_tensor(const std::vector<const Image*>& frames) {
    const Image& f0 = *frames.front();
    Tensor t({frames.size(), static_cast<std::size_t>(f0.channels), static_cast<std::size_t>(f0.height),
              static_cast<std::size_t>(f0.width)});
    std::size_t off = 0;
    for (const Image* img : frames) {
        for (float v : img->data) t[off++] = v;
    }
    return t;
}

// Stack [rows_i, C, H, W] tensors along the first axis.
Tensor concat_rows(const std::vector<Tensor>& parts) {
    std::size_t rows = 0;
    for (const auto& p : parts) rows += p.dim(0);
    std::vector<std::size_t> dims = parts.front().dims();
    dims[0] = rows;
    Tensor out(dims);
    std::size_t off = 0;
    for (const auto& p : parts) {
        std::copy(p.data(), p.data() + p.size(), out.data() + off);
        off += p.size();
    }
    return out;
}

Tensor rows_slice(const Tensor& t, std::size_t start, std::size_t count) {
    std::vector<std::size_t> dims = t.dims();
    const std::size_t row = t.size() / t.dim(0);
    dims[0] = count;
    Tensor out(dims);
    std::copy(t.data() + start * row, t.data() + (start + count) * row, out.data());
    return out;
}

}  // namespace

void run_jobs(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (true) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= n || first_error) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ------------------------------------------------------------ corpus I/O

void write_vocab(const InstrumentVocabulary& vocab, const std::filesystem::path& root) {
    std::filesystem::create_directories(root);
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < vocab.size(); ++g) names.push_back(vocab.name(g));
    std::ofstream os(root / "vocabulary.json");
    if (!os) throw FormatError("cannot write " + (root / "vocabulary.json").string());
    os << names.dump(2) << '\n';
}

InstrumentVocabulary read_vocab(const std::filesystem::path& root) {
    std::ifstream is(root / "vocabulary.json");
    if (!is) throw FormatError("no vocabulary.json under " + root.string());
    nlohmann::json names;
    try {
        names = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("vocabulary.json: " + std::string(e.what()));
    }
    std::vector<std::string> v;
    for (const auto& n : names) v.push_back(n.get<std::string>());
    return InstrumentVocabulary(v);
}

ClipTags read_clip_tags(const std::filesystem::path& root, const std::string& clip_id,
                        const InstrumentVocabulary& vocab) {
    std::ifstream is(root / "clips" / clip_id / "clip.json");
    if (!is) throw FormatError("no clip.json for " + clip_id);
    const auto j = nlohmann::json::parse(is);
    ClipTags tags;
    tags.v.assign(vocab.size(), 0);
    for (const auto& t : j.at("tags")) {
        const int g = vocab.index_of(t.get<std::string>());
        if (g < 0) throw SchemaError("unknown tag in " + clip_id);
        tags.v[static_cast<std::size_t>(g)] = 1;
    }
    return tags;
}

void make_two_class_corpus(const std::filesystem::path& root, int n_train, int n_test,
                           std::uint64_t seed, double train_seconds, double test_seconds,
                           int jobs) {
    InstrumentVocabulary vocab({"Bellotone", "Thrumbox"});
    write_vocab(vocab, root);
    std::filesystem::create_directories(root / "annotations");
    std::filesystem::create_directories(root / "truth");

    struct Job {
        std::string id;
        std::uint64_t seed;
        double seconds;
        std::vector<std::uint8_t> tags;
        bool truth;
    };
    const std::vector<std::uint8_t> patterns[3] = {{1, 1}, {1, 0}, {0, 1}};
    std::vector<Job> work;
    for (int i = 0; i < n_train; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "train_%03d", i);
        work.push_back({buf, seed * 1000 + static_cast<std::uint64_t>(i), train_seconds,
                        patterns[i % 3], false});
    }
    for (int i = 0; i < n_test; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "test_%03d", i);
        work.push_back({buf, seed * 1000 + 500 + static_cast<std::uint64_t>(i), test_seconds,
                        patterns[i % 3], true});
    }

    run_jobs(work.size(), jobs, [&](std::size_t w) {
        const Job& job = work[w];
        const auto spec = two_class_scene(job.id, job.seed, job.seconds, job.tags);
        auto [clip, truth] = generate_scene(spec);
        save_clip(clip, vocab, root);
        save_annotations(truth.keypoints, root / "annotations" / (job.id + ".json"));
        if (job.truth) {
            save_tensor(truth.sound.data, root / "truth" / (job.id + ".sound.tnsr"));
            save_tensor(truth.object_masks, root / "truth" / (job.id + ".masks.tnsr"));
        }
    });
}

std::vector<std::string> clips_with_prefix(const std::filesystem::path& root,
                                           const std::string& prefix) {
    std::vector<std::string> out;
    for (const auto& id : list_clips(root))
        if (id.rfind(prefix, 0) == 0) out.push_back(id);
    return out;
}

SoundActivation load_truth_sound(const std::filesystem::path& root, const std::string& clip_id) {
    SoundActivation s;
    s.data = load_tensor(root / "truth" / (clip_id + ".sound.tnsr"));
    s.fps = kAnchorFps;
    return s;
}

Tensor load_truth_masks(const std::filesystem::path& root, const std::string& clip_id) {
    return load_tensor(root / "truth" / (clip_id + ".masks.tnsr"));
}

// ------------------------------------------------------- feature storage

std::string flow_tag(double flow_fps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", canonical_flow_fps(flow_fps));
    std::string s = buf;
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

void extract_features(const std::filesystem::path& root, double flow_fps, int jobs,
                      const FlowParams& params) {
    const auto vocab = read_vocab(root);
    const auto ids = list_clips(root);
    const auto dir = root / "features";
    std::filesystem::create_directories(dir);
    const std::string tag = flow_tag(flow_fps);

    run_jobs(ids.size(), jobs, [&](std::size_t w) {
        const std::string& id = ids[w];
        const VideoClip clip = load_clip(root, id, vocab);

        const MelStack mel = extract_mel_3scale(clip.audio);
        for (int s = 0; s < 3; ++s)
            save_tensor(mel.scales[static_cast<std::size_t>(s)],
                        dir / (id + ".mel" + std::to_string(s) + ".tnsr"));

        const FlowCache cache(clip, flow_fps, params);
        if (clip.duration_seconds() >= 60.0) {
            const auto subs = split_subclips(clip);
            for (const auto& sub : subs) {
                std::vector<const Image*> frames;
                for (const auto& f : sub.frames) frames.push_back(&f);
                save_tensor(frames_to_tensor(frames),
                            dir / (id + ".rgb.sub" + sub_name(sub.index) + ".tnsr"));
                Tensor flows({static_cast<std::size_t>(kSubClipFrames), 10,
                              static_cast<std::size_t>(clip.frames.front().height),
                              static_cast<std::size_t>(clip.frames.front().width)});
                for (std::size_t k = 0; k < sub.anchor_indices.size(); ++k) {
                    const FlowStack fs = cache.stack(sub.anchor_indices[k]);
                    std::copy(fs.data.data(), fs.data.data() + fs.data.size(),
                              flows.data() + k * fs.data.size());
                }
                save_tensor(flows, dir / (id + ".flow_" + tag + ".sub" + sub_name(sub.index) + ".tnsr"));
            }
        } else {
            const auto T = static_cast<std::size_t>(clip.anchor_count());
            std::vector<const Image*> frames;
            for (std::size_t n = 0; n < T; ++n)
                frames.push_back(&clip.frame_at(static_cast<double>(n) / kAnchorFps));
            save_tensor(frames_to_tensor(frames), dir / (id + ".rgb.all.tnsr"));
            Tensor flows({T, 10, static_cast<std::size_t>(clip.frames.front().height),
                          static_cast<std::size_t>(clip.frames.front().width)});
            for (std::size_t n = 0; n < T; ++n) {
                const FlowStack fs = cache.stack(static_cast<int>(n));
                std::copy(fs.data.data(), fs.data.data() + fs.data.size(),
                          flows.data() + n * fs.data.size());
            }
            save_tensor(flows, dir / (id + ".flow_" + tag + ".all.tnsr"));
        }
    });
}

FeatureStore::FeatureStore(std::filesystem::path corpus_root)
    : dir_(std::move(corpus_root)) {
    dir_ /= "features";
    if (!std::filesystem::is_directory(dir_))
        throw FormatError("no features/ under the corpus; run feature extraction first");
}

std::array<Tensor, 3> FeatureStore::mel(const std::string& id) const {
    std::array<Tensor, 3> out;
    for (int s = 0; s < 3; ++s)
        out[static_cast<std::size_t>(s)] = load_tensor(dir_ / (id + ".mel" + std::to_string(s) + ".tnsr"));
    return out;
}

bool FeatureStore::has_subclips(const std::string& id) const {
    return std::filesystem::exists(dir_ / (id + ".rgb.sub00.tnsr"));
}

Tensor FeatureStore::rgb_sub(const std::string& id, int sub) const {
    return load_tensor(dir_ / (id + ".rgb.sub" + sub_name(sub) + ".tnsr"));
}

Tensor FeatureStore::flow_sub(const std::string& id, int sub, double flow_fps) const {
    return load_tensor(dir_ / (id + ".flow_" + flow_tag(flow_fps) + ".sub" + sub_name(sub) + ".tnsr"));
}

Tensor FeatureStore::rgb_frames(const std::string& id) const {
    const auto all = dir_ / (id + ".rgb.all.tnsr");
    if (std::filesystem::exists(all)) return load_tensor(all);
    std::vector<Tensor> parts;
    for (int s = 0; s < kSubClipCount; ++s) parts.push_back(rgb_sub(id, s));
    return concat_rows(parts);
}

Tensor FeatureStore::flow_frames(const std::string& id, double flow_fps) const {
    const auto all = dir_ / (id + ".flow_" + flow_tag(flow_fps) + ".all.tnsr");
    if (std::filesystem::exists(all)) return load_tensor(all);
    std::vector<Tensor> parts;
    for (int s = 0; s < kSubClipCount; ++s) parts.push_back(flow_sub(id, s, flow_fps));
    return concat_rows(parts);
}

// --------------------------------------------------- inference utilities

ActivationMap map_from_frames(VisualNet& net, const Tensor& frames, Modality modality,
                              std::size_t chunk) {
    const std::size_t T = frames.dim(0);
    ActivationMap map;
    map.fps = kAnchorFps;
    map.stride = net.config().total_stride();
    map.modality = modality;
    for (std::size_t start = 0; start < T; start += chunk) {
        const std::size_t count = std::min(chunk, T - start);
        const Tensor out = net.forward(rows_slice(frames, start, count), false);
        if (start == 0)
            map.data = Tensor({out.dim(1), T, out.dim(2), out.dim(3)});
        for (std::size_t n = 0; n < count; ++n)
            for (std::size_t g = 0; g < out.dim(1); ++g)
                for (std::size_t i = 0; i < out.dim(2); ++i)
                    for (std::size_t j = 0; j < out.dim(3); ++j)
                        map.data.at(g, start + n, i, j) = out.at(n, g, i, j);
    }
    return map;
}

SoundActivation sound_activation(SoundNet& net, const std::array<Tensor, 3>& mel) {
    std::array<Tensor, 3> batched;
    for (int s = 0; s < 3; ++s) {
        const Tensor& m = mel[static_cast<std::size_t>(s)];
        batched[static_cast<std::size_t>(s)] = Tensor({1, m.dim(0), m.dim(1)});
        std::copy(m.data(), m.data() + m.size(), batched[static_cast<std::size_t>(s)].data());
    }
    const Tensor out = net.forward(batched, false);  // [1, G, T']
    SoundActivation snd;
    snd.fps = kAnchorFps;
    snd.data = Tensor({out.dim(1), out.dim(2)});
    for (std::size_t g = 0; g < out.dim(1); ++g)
        for (std::size_t t = 0; t < out.dim(2); ++t) snd.data.at(g, t) = out.at(std::size_t{0}, g, t);
    return snd;
}

void crop_time(ActivationMap& map, std::size_t T) {
    if (map.times() == T) return;
    if (map.times() < T) throw ShapeMismatch("activation map shorter than requested crop");
    Tensor out({map.classes(), T, map.rows(), map.cols()});
    for (std::size_t g = 0; g < map.classes(); ++g)
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t i = 0; i < map.rows(); ++i)
                for (std::size_t j = 0; j < map.cols(); ++j)
                    out.at(g, t, i, j) = map.data.at(g, t, i, j);
    map.data = std::move(out);
}

void crop_time(SoundActivation& snd, std::size_t T) {
    if (snd.times() == T) return;
    if (snd.times() < T) throw ShapeMismatch("sound activation shorter than requested crop");
    Tensor out({snd.classes(), T});
    for (std::size_t g = 0; g < snd.classes(); ++g)
        for (std::size_t t = 0; t < T; ++t) out.at(g, t) = snd.data.at(g, t);
    snd.data = std::move(out);
}

ActivationMap masks_to_map(const Tensor& masks, std::size_t I, std::size_t J) {
    const std::size_t G = masks.dim(0), T = masks.dim(1), H = masks.dim(2), W = masks.dim(3);
    ActivationMap map;
    map.fps = kAnchorFps;
    map.stride = static_cast<int>(H / I);
    map.modality = Modality::object;
    map.data = Tensor({G, T, I, J});
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t y = 0; y < H; ++y)
                for (std::size_t x = 0; x < W; ++x)
                    if (masks.at(g, t, y, x) > 0.0) {
                        const std::size_t i = std::min(I - 1, y * I / H);
                        const std::size_t j = std::min(J - 1, x * J / W);
                        map.data.at(g, t, i, j) = 1.0;
                    }
    return map;
}

// ----------------------------------------------------- dataset assembly

std::vector<SoundTrainItem> sound_items(const FeatureStore& store,
                                        const std::vector<std::string>& ids,
                                        const std::vector<ClipTags>& tags) {
    std::vector<SoundTrainItem> items;
    for (std::size_t i = 0; i < ids.size(); ++i)
        items.push_back({ids[i], store.mel(ids[i]), tags[i]});
    return items;
}

std::vector<Target> action_targets(const TargetSpec& spec, const FeatureStore& store,
                                   const std::vector<std::string>& ids,
                                   const std::vector<ClipTags>& tags, double /*flow_fps*/,
                                   VisualNet* object_net, SoundNet* sound_net) {
    spec.validate();
    const bool need_obj = spec.mode == TargetMode::OT || spec.mode == TargetMode::SOT;
    const bool need_snd = spec.mode == TargetMode::ST || spec.mode == TargetMode::SOT;
    if (need_obj && !object_net) throw MissingAuxiliary("object teacher required for this target");
    if (need_snd && !sound_net) throw MissingAuxiliary("sound teacher required for this target");

    std::vector<Target> targets;
    for (std::size_t c = 0; c < ids.size(); ++c) {
        ActivationMap obj;
        SoundActivation snd;
        std::size_t T = static_cast<std::size_t>(kSubClipCount) * kSubClipFrames;
        if (need_obj) {
            obj = map_from_frames(*object_net, store.rgb_frames(ids[c]), Modality::object);
            T = std::min(T, obj.times());
        }
        if (need_snd) {
            snd = sound_activation(*sound_net, store.mel(ids[c]));
            T = std::min(T, snd.times());
        }
        if (need_obj) crop_time(obj, T);
        if (need_snd) crop_time(snd, T);
        targets.push_back(build_target(spec, tags[c], need_obj ? &obj : nullptr,
                                       need_snd ? &snd : nullptr));
    }
    return targets;
}

VisualDataset visual_dataset(const FeatureStore& store, std::vector<std::string> ids,
                             std::vector<ClipTags> tags, bool flow, double flow_fps,
                             const std::vector<Target>* targets) {
    if (ids.size() != tags.size()) throw ShapeMismatch("clip ids vs tags");
    VisualDataset ds;
    ds.n_clips = ids.size();
    ds.tags = std::move(tags);
    auto shared_ids = std::make_shared<std::vector<std::string>>(std::move(ids));
    ds.batch = [store, shared_ids, flow, flow_fps](std::size_t clip, int sub) {
        return flow ? store.flow_sub((*shared_ids)[clip], sub, flow_fps)
                    : store.rgb_sub((*shared_ids)[clip], sub);
    };
    if (targets) {
        ds.target = [targets](std::size_t clip) { return &(*targets)[clip]; };
    }
    ds.val_frames = [store, shared_ids, flow, flow_fps](std::size_t clip) {
        const std::string& id = (*shared_ids)[clip];
        if (store.has_subclips(id)) {
            std::vector<Tensor> parts;
            for (int s : {0, 6})
                parts.push_back(flow ? store.flow_sub(id, s, flow_fps) : store.rgb_sub(id, s));
            return concat_rows(parts);
        }
        return flow ? store.flow_frames(id, flow_fps) : store.rgb_frames(id);
    };
    return ds;
}

// ------------------------------------------------------------ evaluation

EvalReport evaluate_maps(const std::filesystem::path& root, const std::vector<std::string>& ids,
                         const InstrumentVocabulary& vocab, int height, int width,
                         const std::function<ActivationMap(const std::string&)>& map_for) {
    if (ids.empty()) throw NoValidClips("no clips to evaluate");
    Evaluator eval(vocab, height, width);
    for (const auto& id : ids) {
        const auto anno = load_annotations(root / "annotations" / (id + ".json"));
        eval.add_clip(map_for(id), anno);
    }
    return eval.report();
}

}  // namespace avact::pipeline
