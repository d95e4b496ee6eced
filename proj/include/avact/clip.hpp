#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "avact/image.hpp"
#include "avact/vocabulary.hpp"

namespace avact {

// Anchor grid shared by the sound, object and action streams. The prose
// rate "1.95 FPS" is the display rounding of 31.25/16.
inline constexpr double kAnchorFps = 31.25 / 16.0;  // 1.953125
inline constexpr int kSampleRate = 16000;
inline constexpr int kMelHop = 512;
inline constexpr int kSubClipCount = 12;
inline constexpr int kSubClipFrames = 10;

struct VideoClip {
    std::string clip_id;
    std::vector<Image> frames;
    double frame_fps = 0.0;
    std::vector<float> audio;  // mono PCM, 16 kHz, [-1,1]
    ClipTags tags;

    double duration_seconds() const {
        return frame_fps > 0 ? static_cast<double>(frames.size()) / frame_fps : 0.0;
    }
    // Frame nearest to time t, clamped to the clip range.
    const Image& frame_at(double t) const;
    int frame_index_at(double t) const;
    // Number of anchor grid points covered by the clip.
    int anchor_count() const {
        return static_cast<int>(std::floor(duration_seconds() * kAnchorFps)) + (frames.empty() ? 0 : 1);
    }
};

// A 5-second window of 10 anchor frames; 12 of them tile the first 60 s.
struct SubClip {
    std::string parent_id;
    int index = 0;  // 0..11
    std::vector<Image> frames;              // exactly 10
    std::vector<int> anchor_indices;        // global anchor indices, 10*index .. 10*index+9
};

// Throws ClipTooShort below 60 s. Training ingestion only; evaluation
// never calls this.
std::vector<SubClip> split_subclips(const VideoClip& clip);

}  // namespace avact
