#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "avact/activation.hpp"
#include "avact/annotations.hpp"
#include "avact/clip.hpp"

namespace avact {

// One synthetic "instrument": a colored shape that drifts around its
// home position; while playing, its carrier tone sounds and a sub-patch
// oscillates at the key point.
struct SceneClassSpec {
    std::string name;
    std::array<float, 3> color{1.f, 0.f, 0.f};
    int shape_size = 20;  // square side, px
    double tone_hz = 440.0;
    std::vector<std::pair<double, double>> playing_intervals;  // seconds
    double motion_amplitude = 3.0;  // action oscillation, px
    bool present = true;  // absent classes keep the class index but are not drawn
};

struct SceneSpec {
    std::string clip_id = "synth";
    std::vector<SceneClassSpec> classes;
    double clip_seconds = 62.0;
    int height = 64;
    int width = 64;
    double frame_fps = 7.8125;  // frame grid; a multiple of the anchor rate
    std::uint64_t seed = 0;

    void validate() const;  // throws SpecError
};

struct SceneTruth {
    ClipTags tags;
    SoundActivation sound;          // [G, T] on the anchor grid, {0,1}
    Tensor object_masks;            // [G, T, H, W], {0,1}
    KeyPointAnnotationSet keypoints;  // every anchor frame; empty sets off-interval
};

// Deterministic given spec.seed: two calls produce bit-identical clips
// and ground truth.
std::pair<VideoClip, SceneTruth> generate_scene(const SceneSpec& spec);

// Convenience two-class spec used by the desk-scale benchmarks.
SceneSpec two_class_scene(const std::string& clip_id, std::uint64_t seed, double clip_seconds,
                          std::vector<std::uint8_t> tags = {1, 1});

}  // namespace avact
