#include "avact/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

namespace avact {

std::optional<double> frame_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    if (scores.size() != labels.size()) throw ShapeMismatch("frame_auc scores vs labels");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (auto l : labels) n_pos += l ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    // midranks, ties averaged
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    double rank_pos = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (labels[k]) rank_pos += rank[k];
    const double u = rank_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Tensor upsample_bilinear(const Tensor& frame, std::size_t height, std::size_t width) {
    if (frame.rank() != 2) throw ShapeMismatch("upsample_bilinear expects [I,J]");
    const std::size_t I = frame.dim(0), J = frame.dim(1);
    Tensor out({height, width});
    for (std::size_t y = 0; y < height; ++y) {
        const double sy = (static_cast<double>(y) + 0.5) * static_cast<double>(I) / static_cast<double>(height) - 0.5;
        const double cy = std::clamp(sy, 0.0, static_cast<double>(I - 1));
        const std::size_t y0 = static_cast<std::size_t>(cy);
        const std::size_t y1 = std::min(y0 + 1, I - 1);
        const double fy = cy - static_cast<double>(y0);
        for (std::size_t x = 0; x < width; ++x) {
            const double sx =
                (static_cast<double>(x) + 0.5) * static_cast<double>(J) / static_cast<double>(width) - 0.5;
            const double cx = std::clamp(sx, 0.0, static_cast<double>(J - 1));
            const std::size_t x0 = static_cast<std::size_t>(cx);
            const std::size_t x1 = std::min(x0 + 1, J - 1);
            const double fx = cx - static_cast<double>(x0);
            out.at(y, x) = (1 - fy) * ((1 - fx) * frame.at(y0, x0) + fx * frame.at(y0, x1)) +
                           fy * ((1 - fx) * frame.at(y1, x0) + fx * frame.at(y1, x1));
        }
    }
    return out;
}

KeyPoint argmax_location(const Tensor& map_frame, std::size_t height, std::size_t width,
                         const ArgmaxPolicy& policy) {
    if (map_frame.rank() != 2 || map_frame.size() == 0) throw EmptyMap("argmax_location needs an [I,J] frame");
    if (policy.cell_center) {
        const std::size_t J = map_frame.dim(1);
        const std::size_t idx = map_frame.argmax();
        const double i = static_cast<double>(idx / J), j = static_cast<double>(idx % J);
        return {static_cast<float>(j * policy.stride + policy.stride / 2.0),
                static_cast<float>(i * policy.stride + policy.stride / 2.0)};
    }
    Tensor up = upsample_bilinear(map_frame, height, width);
    const std::size_t idx = up.argmax();
    return {static_cast<float>(idx % width), static_cast<float>(idx / width)};
}

double spatial_distance(const Tensor& map_frame, const std::vector<KeyPoint>& keypoints,
                        std::size_t height, std::size_t width, const ArgmaxPolicy& policy) {
    if (keypoints.empty()) throw EmptyKeypoints("spatial_distance on a frame with no key points");
    const KeyPoint m = argmax_location(map_frame, height, width, policy);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : keypoints) {
        const double dx = static_cast<double>(l[0]) - m[0], dy = static_cast<double>(l[1]) - m[1];
        best = std::min(best, std::hypot(dx, dy));
    }
    return best;
}

double object_hit_rate(const std::vector<Tensor>& map_frames, const std::vector<std::vector<Box>>& boxes,
                       std::size_t height, std::size_t width, const ArgmaxPolicy& policy) {
    if (map_frames.size() != boxes.size()) throw ShapeMismatch("hit rate frames vs boxes");
    if (map_frames.empty()) throw NoBoxes("no images to evaluate");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < map_frames.size(); ++i) {
        if (boxes[i].empty()) throw NoBoxes("image " + std::to_string(i) + " has no ground-truth boxes");
        const KeyPoint m = argmax_location(map_frames[i], height, width, policy);
        for (const auto& b : boxes[i])
            if (b.contains(m)) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / static_cast<double>(map_frames.size());
}

std::vector<std::uint8_t> frame_positivity(const KeyPointAnnotationSet& anno,
                                           const std::vector<int>& frame_indices,
                                           const std::string& instrument) {
    std::vector<std::uint8_t> out;
    out.reserve(frame_indices.size());
    for (int t : frame_indices) out.push_back(anno.positive(t, instrument) ? 1 : 0);
    return out;
}

// ---------------------------------------------------------------- report

namespace {
double nan_mean(const std::vector<double>& v) {
    double acc = 0.0;
    int n = 0;
    for (double x : v)
        if (!std::isnan(x)) {
            acc += x;
            ++n;
        }
    return n ? acc / n : std::numeric_limits<double>::quiet_NaN();
}
}  // namespace

double EvalReport::average_auc() const { return nan_mean(temporal_auc); }
double EvalReport::average_spatial() const { return nan_mean(spatial_px); }

void EvalReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "instrument,temporal_auc,spatial_px,n_clips,n_skipped,n_positive_frames\n";
    for (std::size_t g = 0; g < instruments.size(); ++g)
        os << instruments[g] << ',' << temporal_auc[g] << ',' << spatial_px[g] << ',' << auc_clips[g] << ','
           << skipped_clips[g] << ',' << positive_frames[g] << '\n';
    os << "Average," << average_auc() << ',' << average_spatial() << ",,,\n";
}

void EvalReport::print_table(std::ostream& os) const {
    os << std::left << std::setw(12) << "Instrument" << std::right << std::setw(10) << "AUC" << std::setw(12)
       << "Dist(px)" << std::setw(9) << "clips" << std::setw(9) << "skipped" << '\n';
    os << std::string(52, '-') << '\n';
    auto cell = [&](double v) {
        if (std::isnan(v))
            os << std::setw(10) << "n/a";
        else
            os << std::setw(10) << std::fixed << std::setprecision(3) << v;
    };
    for (std::size_t g = 0; g < instruments.size(); ++g) {
        os << std::left << std::setw(12) << instruments[g] << std::right;
        cell(temporal_auc[g]);
        os << "  ";
        cell(spatial_px[g]);
        os << std::setw(9) << auc_clips[g] << std::setw(9) << skipped_clips[g] << '\n';
    }
    os << std::string(52, '-') << '\n';
    os << std::left << std::setw(12) << "Average" << std::right;
    cell(average_auc());
    os << "  ";
    cell(average_spatial());
    os << '\n';
}

// ------------------------------------------------------------- evaluator

Evaluator::Evaluator(InstrumentVocabulary vocab, int input_height, int input_width, ArgmaxPolicy policy)
    : vocab_(std::move(vocab)), height_(input_height), width_(input_width), policy_(policy),
      per_class_(vocab_.size()) {}

void Evaluator::add_clip(const ActivationMap& map, const KeyPointAnnotationSet& anno) {
    if (map.classes() != vocab_.size()) throw ShapeMismatch("map class count vs vocabulary");
    const std::size_t T = map.times(), I = map.rows(), J = map.cols();
    std::vector<int> frames;
    for (int t : anno.frame_indices())
        if (t >= 0 && static_cast<std::size_t>(t) < T) frames.push_back(t);
    if (frames.empty()) return;

    for (std::size_t g = 0; g < vocab_.size(); ++g) {
        const std::string& inst = vocab_.name(g);
        std::vector<double> scores;
        std::vector<std::uint8_t> labels;
        double dist_acc = 0.0;
        int dist_n = 0;
        for (int t : frames) {
            Tensor frame({I, J});
            for (std::size_t i = 0; i < I; ++i)
                for (std::size_t j = 0; j < J; ++j) frame.at(i, j) = map.data.at(g, t, i, j);
            scores.push_back(frame.max());
            const bool pos = anno.positive(t, inst);
            labels.push_back(pos ? 1 : 0);
            if (pos) {
                dist_acc += spatial_distance(frame, *anno.keypoints(t, inst), height_, width_, policy_);
                ++dist_n;
            }
        }
        auto& pc = per_class_[g];
        if (auto auc = frame_auc(scores, labels)) {
            pc.auc_sum += *auc;
            ++pc.auc_clips;
        } else {
            ++pc.skipped;
        }
        if (dist_n > 0) {
            pc.dist_sum += dist_acc / dist_n;
            ++pc.dist_clips;
            pc.positive_frames += dist_n;
        }
    }
}

EvalReport Evaluator::report() const {
    EvalReport r;
    for (std::size_t g = 0; g < vocab_.size(); ++g) {
        const auto& pc = per_class_[g];
        r.instruments.push_back(vocab_.name(g));
        r.temporal_auc.push_back(pc.auc_clips ? pc.auc_sum / pc.auc_clips
                                              : std::numeric_limits<double>::quiet_NaN());
        r.auc_clips.push_back(pc.auc_clips);
        r.skipped_clips.push_back(pc.skipped);
        r.spatial_px.push_back(pc.dist_clips ? pc.dist_sum / pc.dist_clips
                                             : std::numeric_limits<double>::quiet_NaN());
        r.positive_frames.push_back(pc.positive_frames);
    }
    return r;
}

}  // namespace avact
