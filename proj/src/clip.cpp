#include "avact/clip.hpp"

#include <algorithm>

namespace avact {

int VideoClip::frame_index_at(double t) const {
    if (frames.empty()) throw EmptyImage("clip '" + clip_id + "' has no frames");
    long idx = std::lround(t * frame_fps);
    idx = std::clamp<long>(idx, 0, static_cast<long>(frames.size()) - 1);
    return static_cast<int>(idx);
}

const Image& VideoClip::frame_at(double t) const { return frames[frame_index_at(t)]; }

std::vector<SubClip> split_subclips(const VideoClip& clip) {
    if (clip.duration_seconds() < 60.0)
        throw ClipTooShort("clip '" + clip.clip_id + "' is " + std::to_string(clip.duration_seconds()) +
                           " s, need >= 60 s");
    std::vector<SubClip> out;
    out.reserve(kSubClipCount);
    for (int k = 0; k < kSubClipCount; ++k) {
        SubClip sc;
        sc.parent_id = clip.clip_id;
        sc.index = k;
        sc.frames.reserve(kSubClipFrames);
        sc.anchor_indices.reserve(kSubClipFrames);
        for (int m = 0; m < kSubClipFrames; ++m) {
            int n = k * kSubClipFrames + m;
            // anchor t_n = n / 1.953125 s; the last anchors of a 60.0 s
            // clip clamp to the final frame
            sc.frames.push_back(clip.frame_at(static_cast<double>(n) / kAnchorFps));
            sc.anchor_indices.push_back(n);
        }
        out.push_back(std::move(sc));
    }
    return out;
}

}  // namespace avact
