#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "avact/corpus.hpp"
#include "avact/flow.hpp"
#include "avact/fusion.hpp"
#include "avact/metrics.hpp"
#include "avact/supervision.hpp"
#include "avact/synth.hpp"
#include "avact/training.hpp"

namespace avact::pipeline {

// ------------------------------------------------------------ corpus I/O

// Vocabulary file at <root>/vocabulary.json (ordered name list).
void write_vocab(const InstrumentVocabulary& vocab, const std::filesystem::path& root);
InstrumentVocabulary read_vocab(const std::filesystem::path& root);

// Tags only, without decoding the frames.
ClipTags read_clip_tags(const std::filesystem::path& root, const std::string& clip_id,
                        const InstrumentVocabulary& vocab);

// Two-class synthetic corpus: clips train_### / test_###, cycling tag
// patterns {1,1},{1,0},{0,1}; key-point annotations for every clip and
// ground-truth tensors (truth/<id>.sound.tnsr, truth/<id>.masks.tnsr)
// for the test split.
void make_two_class_corpus(const std::filesystem::path& root, int n_train, int n_test,
                           std::uint64_t seed, double train_seconds = 62.0,
                           double test_seconds = 22.0, int jobs = 1);

std::vector<std::string> clips_with_prefix(const std::filesystem::path& root,
                                           const std::string& prefix);

SoundActivation load_truth_sound(const std::filesystem::path& root, const std::string& clip_id);
Tensor load_truth_masks(const std::filesystem::path& root, const std::string& clip_id);

// ------------------------------------------------------- feature storage

// Precomputed per-clip features under <root>/features/:
//   <id>.mel{0,1,2}.tnsr                     [128, T_mel]
//   <id>.rgb.sub<kk>.tnsr                    [10, 3, H, W]   (clips >= 60 s)
//   <id>.flow_<tag>.sub<kk>.tnsr             [10, 10, H, W]
//   <id>.rgb.all.tnsr / <id>.flow_<tag>.all.tnsr  (shorter clips; every anchor)
std::string flow_tag(double flow_fps);  // e.g. 7.8125 -> "7p8125"
void extract_features(const std::filesystem::path& root, double flow_fps, int jobs = 1,
                      const FlowParams& params = {});

class FeatureStore {
public:
    explicit FeatureStore(std::filesystem::path corpus_root);

    std::array<Tensor, 3> mel(const std::string& id) const;
    bool has_subclips(const std::string& id) const;
    Tensor rgb_sub(const std::string& id, int sub) const;
    Tensor flow_sub(const std::string& id, int sub, double flow_fps) const;
    // Every anchor frame, [T, C, H, W]: .all file when present, else the
    // concatenated sub-clip files (T = 120).
    Tensor rgb_frames(const std::string& id) const;
    Tensor flow_frames(const std::string& id, double flow_fps) const;

private:
    std::filesystem::path dir_;
};

// --------------------------------------------------- inference utilities

// Frame batch [T, C, H, W] -> activation map [G, T, I, J] on the anchor
// grid (eval mode, chunked to bound memory).
ActivationMap map_from_frames(VisualNet& net, const Tensor& frames, Modality modality,
                              std::size_t chunk = 10);
SoundActivation sound_activation(SoundNet& net, const std::array<Tensor, 3>& mel);

void crop_time(ActivationMap& map, std::size_t T);
void crop_time(SoundActivation& snd, std::size_t T);

// Ground-truth masks [G, T, H, W] spatially max-pooled onto an (I, J)
// map grid -> oracle object activation.
ActivationMap masks_to_map(const Tensor& masks, std::size_t I, std::size_t J);

// ----------------------------------------------------- dataset assembly

std::vector<SoundTrainItem> sound_items(const FeatureStore& store,
                                        const std::vector<std::string>& ids,
                                        const std::vector<ClipTags>& tags);

// Per-clip action-training targets (teacher outputs cropped to the
// sub-clip anchor range). Pass null teachers for modes that do not need
// them.
std::vector<Target> action_targets(const TargetSpec& spec, const FeatureStore& store,
                                   const std::vector<std::string>& ids,
                                   const std::vector<ClipTags>& tags, double flow_fps,
                                   VisualNet* object_net, SoundNet* sound_net);

// Disk-backed dataset over >= 60 s clips; validation frames are the
// anchors of sub-clips 0 and 6 (or every anchor for short clips).
VisualDataset visual_dataset(const FeatureStore& store, std::vector<std::string> ids,
                             std::vector<ClipTags> tags, bool flow, double flow_fps,
                             const std::vector<Target>* targets = nullptr);

// ------------------------------------------------------------ evaluation

// map_for(id) produces the (possibly fused) activation map to score.
EvalReport evaluate_maps(const std::filesystem::path& root, const std::vector<std::string>& ids,
                         const InstrumentVocabulary& vocab, int height, int width,
                         const std::function<ActivationMap(const std::string&)>& map_for);

// Simple fork-join helper honoring the --jobs contract (jobs = 1 runs
// inline and deterministically ordered).
void run_jobs(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace avact::pipeline
