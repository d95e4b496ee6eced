#pragma once

#include <vector>

#include "avact/clip.hpp"
#include "avact/tensor.hpp"

namespace avact {

// Five dense optical flows around one anchor frame, interleaved as
// (dx, dy) pairs: 10 channels total, clipped and normalized to [-1,1].
struct FlowStack {
    Tensor data;  // [10, H, W]
    double anchor_time = 0.0;
    double flow_fps = 0.0;
};

struct FlowParams {
    // Farneback-style pyramidal dense flow defaults; the paper names
    // the family only.
    int pyramid_levels = 3;
    double pyramid_scale = 0.5;
    int window = 15;
    int iterations = 3;
    double clip_px = 20.0;  // clip each component to +-clip_px, then divide
};

// Temporal resolutions of the flow sweep; 31.25/16 * 2^k.
inline constexpr double kFlowFpsChoices[5] = {1.953125, 3.90625, 7.8125, 15.625, 31.25};
// Accepts display-rounded values (1.95, 3.9, 7.8, 15.6, 31.3) too.
double canonical_flow_fps(double fps);

// Dense (dx, dy) flow from frame a to frame b (grayscale-converted),
// in pixels, un-normalized. Both frames must share dimensions.
Tensor dense_flow(const Image& a, const Image& b, const FlowParams& params = {});

// Flow stack for the anchor at index `anchor_index` on the 1.953125-FPS
// grid: five flows between consecutive frames spaced 1/flow_fps s (two
// before the anchor flow, two after). Frame lookup clamps at the clip
// edges, which replicates the boundary flows.
FlowStack extract_flow_stack(const VideoClip& clip, int anchor_index, double flow_fps,
                             const FlowParams& params = {});

// Precomputed per-clip flow cache: all consecutive-pair flows on the
// 1/flow_fps grid, so overlapping stacks share work.
class FlowCache {
public:
    FlowCache(const VideoClip& clip, double flow_fps, const FlowParams& params = {});
    FlowStack stack(int anchor_index) const;
    double flow_fps() const { return flow_fps_; }

private:
    std::vector<Tensor> flows_;  // flows_[m]: flow from grid frame m to m+1
    double flow_fps_;
    double duration_;
    double clip_px_;
};

}  // namespace avact
