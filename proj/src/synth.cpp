#include "avact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace avact {

namespace {

struct ClassMotion {
    double drift_ax, drift_ay, drift_fx, drift_fy, drift_px, drift_py;
    double osc_freq, osc_phase;
    bool osc_vertical;
};

bool playing_at(const SceneClassSpec& cls, double t) {
    for (const auto& [a, b] : cls.playing_intervals)
        if (t >= a && t < b) return true;
    return false;
}

void draw_square(Image& img, double cx, double cy, int side, const std::array<float, 3>& color) {
    const int x0 = std::max(0, static_cast<int>(std::lround(cx)) - side / 2);
    const int y0 = std::max(0, static_cast<int>(std::lround(cy)) - side / 2);
    const int x1 = std::min(img.width - 1, x0 + side - 1);
    const int y1 = std::min(img.height - 1, y0 + side - 1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            for (int c = 0; c < 3; ++c) img.at(c, y, x) = color[static_cast<std::size_t>(c)];
}

}  // namespace

void SceneSpec::validate() const {
    if (classes.empty()) throw SpecError("scene needs at least one class");
    if (clip_seconds <= 0 || height <= 0 || width <= 0 || frame_fps <= 0)
        throw SpecError("scene dims/duration/fps must be positive");
    for (const auto& c : classes)
        for (const auto& [a, b] : c.playing_intervals)
            if (a < 0 || b > clip_seconds || a >= b)
                throw SpecError("class '" + c.name + "' interval outside clip");
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            if (std::abs(classes[i].tone_hz - classes[j].tone_hz) < 1.0 &&
                !classes[i].playing_intervals.empty() && !classes[j].playing_intervals.empty())
                throw SpecError("classes '" + classes[i].name + "' and '" + classes[j].name +
                                "' share a carrier tone");
}

std::pair<VideoClip, SceneTruth> generate_scene(const SceneSpec& spec) {
    spec.validate();
    const std::size_t G = spec.classes.size();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // per-class motion parameters
    std::vector<ClassMotion> motion(G);
    for (auto& m : motion) {
        // drift is always on, with peak velocity overlapping the playing
        // oscillation's, so flow magnitude alone does not reveal playing;
        // only the faster sign-flip cadence of the oscillation does
        m.drift_ax = 5.0 + 4.0 * unit(rng);
        m.drift_ay = 5.0 + 4.0 * unit(rng);
        m.drift_fx = 0.8 + 0.4 * unit(rng);
        m.drift_fy = 0.8 + 0.4 * unit(rng);
        m.drift_px = 2.0 * M_PI * unit(rng);
        m.drift_py = 2.0 * M_PI * unit(rng);
        m.osc_freq = 2.5 + 1.0 * unit(rng);
        m.osc_phase = 2.0 * M_PI * unit(rng);
        m.osc_vertical = unit(rng) < 0.5;
    }

    // static background texture so the flow estimator has structure
    Image background(3, spec.height, spec.width);
    for (auto& v : background.data) v = 0.45f + 0.1f * static_cast<float>(unit(rng));

    auto osc_offset = [&](std::size_t g, double t) {
        const auto& m = motion[g];
        const double d = spec.classes[g].motion_amplitude * std::sin(2.0 * M_PI * m.osc_freq * t + m.osc_phase);
        return m.osc_vertical ? std::pair<double, double>{0.0, d} : std::pair<double, double>{d, 0.0};
    };
    // the whole shape (and hence mask / key-point truth) carries the playing
    // oscillation on top of the ever-present drift
    auto center_of = [&](std::size_t g, double t) {
        const double home_x = (static_cast<double>(g) + 0.5) * spec.width / static_cast<double>(G);
        const double home_y = spec.height / 2.0;
        const auto& m = motion[g];
        double cx = home_x + m.drift_ax * std::sin(2.0 * M_PI * m.drift_fx * t + m.drift_px);
        double cy = home_y + m.drift_ay * std::sin(2.0 * M_PI * m.drift_fy * t + m.drift_py);
        if (playing_at(spec.classes[g], t)) {
            const auto [dx, dy] = osc_offset(g, t);
            cx += dx;
            cy += dy;
        }
        return std::pair<double, double>{cx, cy};
    };

    VideoClip clip;
    clip.clip_id = spec.clip_id;
    clip.frame_fps = spec.frame_fps;
    clip.tags.v.assign(G, 0);
    for (std::size_t g = 0; g < G; ++g) clip.tags.v[g] = spec.classes[g].present ? 1 : 0;

    const auto n_frames = static_cast<std::size_t>(std::floor(spec.clip_seconds * spec.frame_fps)) + 1;
    clip.frames.reserve(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const double t = static_cast<double>(f) / spec.frame_fps;
        Image img = background;
        for (std::size_t g = 0; g < G; ++g) {
            const auto& cls = spec.classes[g];
            if (!cls.present) continue;
            const auto [cx, cy] = center_of(g, t);
            draw_square(img, cx, cy, cls.shape_size, cls.color);
            const int patch = std::max(3, cls.shape_size / 3);
            const std::array<float, 3> dark{cls.color[0] * 0.35f, cls.color[1] * 0.35f, cls.color[2] * 0.35f};
            draw_square(img, cx, cy, patch, dark);
        }
        clip.frames.push_back(std::move(img));
    }

    // audio: class tones at -12 dBFS during their intervals, plus
    // -40 dBFS noise so the mel features are non-degenerate
    const auto n_samples = static_cast<std::size_t>(spec.clip_seconds * kSampleRate);
    clip.audio.assign(n_samples, 0.f);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (std::size_t i = 0; i < n_samples; ++i) clip.audio[i] = static_cast<float>(noise(rng));
    for (std::size_t g = 0; g < G; ++g) {
        const auto& cls = spec.classes[g];
        if (!cls.present) continue;
        for (const auto& [a, b] : cls.playing_intervals) {
            const auto s0 = static_cast<std::size_t>(a * kSampleRate);
            const auto s1 = std::min(n_samples, static_cast<std::size_t>(b * kSampleRate));
            for (std::size_t i = s0; i < s1; ++i)
                clip.audio[i] += static_cast<float>(
                    0.25 * std::sin(2.0 * M_PI * cls.tone_hz * static_cast<double>(i) / kSampleRate));
        }
    }

    // ground truth on the anchor grid
    const auto T = static_cast<std::size_t>(clip.anchor_count());
    SceneTruth truth;
    truth.tags = clip.tags;
    truth.sound.fps = kAnchorFps;
    truth.sound.data = Tensor({G, T});
    truth.object_masks = Tensor({G, T, static_cast<std::size_t>(spec.height), static_cast<std::size_t>(spec.width)});
    truth.keypoints.clip_id = spec.clip_id;
    truth.keypoints.fps = kAnchorFps;
    truth.keypoints.width = spec.width;
    truth.keypoints.height = spec.height;

    for (std::size_t n = 0; n < T; ++n) {
        const double t = static_cast<double>(n) / kAnchorFps;
        auto& frame_anno = truth.keypoints.frames[static_cast<int>(n)];
        for (std::size_t g = 0; g < G; ++g) {
            const auto& cls = spec.classes[g];
            if (!cls.present) continue;
            const auto [cx, cy] = center_of(g, t);
            const int x0 = std::max(0, static_cast<int>(std::lround(cx)) - cls.shape_size / 2);
            const int y0 = std::max(0, static_cast<int>(std::lround(cy)) - cls.shape_size / 2);
            const int x1 = std::min(spec.width - 1, x0 + cls.shape_size - 1);
            const int y1 = std::min(spec.height - 1, y0 + cls.shape_size - 1);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    truth.object_masks.at(g, n, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = 1.0;
            if (playing_at(cls, t)) {
                truth.sound.data.at(g, n) = 1.0;
                const float kx = std::clamp(static_cast<float>(cx), 0.f, static_cast<float>(spec.width - 1));
                const float ky = std::clamp(static_cast<float>(cy), 0.f, static_cast<float>(spec.height - 1));
                frame_anno[cls.name].push_back({kx, ky});
            }
        }
    }
    return {std::move(clip), std::move(truth)};
}

SceneSpec two_class_scene(const std::string& clip_id, std::uint64_t seed, double clip_seconds,
                          std::vector<std::uint8_t> tags) {
    SceneSpec spec;
    spec.clip_id = clip_id;
    spec.seed = seed;
    spec.clip_seconds = clip_seconds;
    std::mt19937_64 rng(seed ^ 0xa5a5a5a5ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const SceneClassSpec bases[2] = {
        {"Bellotone", {0.95f, 0.15f, 0.1f}, 22, 440.0, {}, 3.0},
        {"Thrumbox", {0.1f, 0.25f, 0.95f}, 22, 1567.0, {}, 3.0},
    };
    if (tags.size() != 2) throw SpecError("two_class_scene expects 2 tag entries");
    for (int g = 0; g < 2; ++g) {
        SceneClassSpec cls = bases[g];
        if (!tags[static_cast<std::size_t>(g)]) {
            // class absent from this clip; keep the rng stream aligned
            for (int b = 0; b < 8; ++b) unit(rng);
            cls.present = false;
            cls.playing_intervals.clear();
            spec.classes.push_back(std::move(cls));
            continue;
        }
        // playing blocks of ~8 s, at least one on and one off
        const int n_blocks = std::max(2, static_cast<int>(clip_seconds / 8.0));
        const double block = clip_seconds / n_blocks;
        std::vector<bool> on(static_cast<std::size_t>(n_blocks));
        for (int b = 0; b < n_blocks; ++b) on[static_cast<std::size_t>(b)] = unit(rng) < 0.5;
        for (int b = n_blocks; b < 8; ++b) unit(rng);  // fixed-length stream per class
        if (std::none_of(on.begin(), on.end(), [](bool x) { return x; })) on[0] = true;
        if (std::all_of(on.begin(), on.end(), [](bool x) { return x; })) on[on.size() / 2] = false;
        for (int b = 0; b < n_blocks; ++b)
            if (on[static_cast<std::size_t>(b)]) {
                const double a = b * block, e = std::min(clip_seconds, (b + 1) * block);
                if (!cls.playing_intervals.empty() && cls.playing_intervals.back().second >= a - 1e-9)
                    cls.playing_intervals.back().second = e;
                else
                    cls.playing_intervals.emplace_back(a, e);
            }
        spec.classes.push_back(std::move(cls));
    }
    return spec;
}

}  // namespace avact
