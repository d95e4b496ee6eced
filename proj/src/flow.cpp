#include "avact/flow.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>
#include <opencv2/video/tracking.hpp>

namespace avact {

double canonical_flow_fps(double fps) {
    constexpr double display[5] = {1.95, 3.9, 7.8, 15.6, 31.3};
    for (int i = 0; i < 5; ++i)
        if (std::abs(fps - kFlowFpsChoices[i]) < 1e-6 || std::abs(fps - display[i]) < 1e-6)
            return kFlowFpsChoices[i];
    throw ConfigError("flow fps must be one of 1.95, 3.9, 7.8, 15.6, 31.3 (got " + std::to_string(fps) + ")");
}

namespace {

cv::Mat gray_u8(const Image& img) {
    Image g = to_grayscale(img);
    cv::Mat m(g.height, g.width, CV_8U);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            m.at<std::uint8_t>(y, x) =
                static_cast<std::uint8_t>(std::lround(std::clamp(g.at(0, y, x), 0.f, 1.f) * 255.f));
    return m;
}

}  // namespace

Tensor dense_flow(const Image& a, const Image& b, const FlowParams& params) {
    if (a.empty() || b.empty()) throw EmptyImage("dense_flow on empty frame");
    if (a.height != b.height || a.width != b.width) throw ShapeMismatch("flow frame dims differ");
    cv::Mat prev = gray_u8(a), next = gray_u8(b), flow;
    // identical frames carry no motion by definition; the estimator's
    // polynomial expansion would otherwise leave numerical residue
    if (cv::countNonZero(prev != next) == 0)
        return Tensor({2, static_cast<std::size_t>(a.height), static_cast<std::size_t>(a.width)});
    cv::calcOpticalFlowFarneback(prev, next, flow, params.pyramid_scale, params.pyramid_levels,
                                 params.window, params.iterations, 5, 1.1, 0);
    Tensor out({2, static_cast<std::size_t>(a.height), static_cast<std::size_t>(a.width)});
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            const auto& v = flow.at<cv::Point2f>(y, x);
            out.at(0, y, x) = v.x;
            out.at(1, y, x) = v.y;
        }
    return out;
}

namespace {

// Assemble the normalized 10-channel stack from five raw flows.
FlowStack assemble(const std::vector<const Tensor*>& five, double anchor_time, double fps, double clip_px) {
    const std::size_t H = five[0]->dim(1), W = five[0]->dim(2);
    FlowStack fs;
    fs.anchor_time = anchor_time;
    fs.flow_fps = fps;
    fs.data = Tensor({10, H, W});
    for (int k = 0; k < 5; ++k)
        for (int c = 0; c < 2; ++c)
            for (std::size_t y = 0; y < H; ++y)
                for (std::size_t x = 0; x < W; ++x)
                    fs.data.at(2 * k + c, y, x) =
                        std::clamp(five[k]->at(c, y, x), -clip_px, clip_px) / clip_px;
    return fs;
}

}  // namespace

FlowStack extract_flow_stack(const VideoClip& clip, int anchor_index, double flow_fps,
                             const FlowParams& params) {
    flow_fps = canonical_flow_fps(flow_fps);
    if (clip.frames.size() < 2) throw InsufficientFrames("clip '" + clip.clip_id + "' has < 2 frames");
    const double anchor_time = static_cast<double>(anchor_index) / kAnchorFps;
    const double dt = 1.0 / flow_fps;
    std::vector<Tensor> flows(5);
    std::vector<const Tensor*> ptrs(5);
    for (int k = 0; k < 5; ++k) {
        // flow k spans [anchor + (k-2) dt, anchor + (k-1) dt]
        const double t0 = anchor_time + (k - 2) * dt;
        int i0 = clip.frame_index_at(t0);
        int i1 = clip.frame_index_at(t0 + dt);
        if (i0 == i1) {  // clamped at a clip edge; replicate the nearest real pair
            if (i1 + 1 < static_cast<int>(clip.frames.size()))
                ++i1;
            else
                --i0;
        }
        flows[k] = dense_flow(clip.frames[i0], clip.frames[i1], params);
        ptrs[k] = &flows[k];
    }
    return assemble(ptrs, anchor_time, flow_fps, params.clip_px);
}

FlowCache::FlowCache(const VideoClip& clip, double flow_fps, const FlowParams& params)
    : flow_fps_(canonical_flow_fps(flow_fps)), duration_(clip.duration_seconds()), clip_px_(params.clip_px) {
    if (clip.frames.size() < 2) throw InsufficientFrames("clip '" + clip.clip_id + "' has < 2 frames");
    const int grid_points = static_cast<int>(std::floor(duration_ * flow_fps_)) + 1;
    const int n_flows = std::max(1, grid_points - 1);
    flows_.reserve(n_flows);
    for (int m = 0; m < n_flows; ++m) {
        const Image& a = clip.frame_at(m / flow_fps_);
        const Image& b = clip.frame_at((m + 1) / flow_fps_);
        flows_.push_back(dense_flow(a, b, params));
    }
}

FlowStack FlowCache::stack(int anchor_index) const {
    const double anchor_time = static_cast<double>(anchor_index) / kAnchorFps;
    // anchor_time * flow_fps is integral for every supported fps
    const long base = std::lround(anchor_time * flow_fps_);
    std::vector<const Tensor*> five(5);
    for (int k = 0; k < 5; ++k) {
        long idx = std::clamp<long>(base + k - 2, 0, static_cast<long>(flows_.size()) - 1);
        five[k] = &flows_[static_cast<std::size_t>(idx)];
    }
    return assemble(five, anchor_time, flow_fps_, clip_px_);
}

}  // namespace avact
