#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "avact/activation.hpp"
#include "avact/annotations.hpp"
#include "avact/vocabulary.hpp"

namespace avact {

// Mann-Whitney AUC over one clip's frames, tie pairs credited 0.5.
// Empty when all labels agree (degenerate clip, skipped upstream).
std::optional<double> frame_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

// Bilinear upsampling of one map frame [I,J] to input resolution [H,W]
// (half-pixel-aligned sampling).
Tensor upsample_bilinear(const Tensor& frame, std::size_t height, std::size_t width);

// Where the prediction peaks, in input-pixel coordinates (x, y). Either
// on the bilinearly upsampled map (default) or at the stride-grid cell
// center.
struct ArgmaxPolicy {
    bool cell_center = false;
    int stride = 1;  // used by the cell-center variant
};
KeyPoint argmax_location(const Tensor& map_frame, std::size_t height, std::size_t width,
                         const ArgmaxPolicy& policy = {});

// Min distance from the max location to the annotated key points.
// Positive frames only; throws EmptyKeypoints.
double spatial_distance(const Tensor& map_frame, const std::vector<KeyPoint>& keypoints,
                        std::size_t height, std::size_t width, const ArgmaxPolicy& policy = {});

// Axis-aligned box in input-pixel coordinates, borders inclusive.
struct Box {
    float x0, y0, x1, y1;
    bool contains(const KeyPoint& p) const {
        return p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1;
    }
};

// Fraction of images whose argmax falls inside any ground-truth box of
// the evaluated class. One class per call; boxes[i] are image i's boxes.
double object_hit_rate(const std::vector<Tensor>& map_frames, const std::vector<std::vector<Box>>& boxes,
                       std::size_t height, std::size_t width, const ArgmaxPolicy& policy = {});

// Frame positivity per annotation frame index, for one class.
std::vector<std::uint8_t> frame_positivity(const KeyPointAnnotationSet& anno,
                                           const std::vector<int>& frame_indices,
                                           const std::string& instrument);

struct EvalReport {
    std::vector<std::string> instruments;
    std::vector<double> temporal_auc;        // NaN when no valid clips
    std::vector<int> auc_clips;              // clips retained per class
    std::vector<int> skipped_clips;          // degenerate clips per class
    std::vector<double> spatial_px;          // NaN when no positive frames
    std::vector<int> positive_frames;

    double average_auc() const;
    double average_spatial() const;
    void write_csv(const std::filesystem::path& path) const;
    void print_table(std::ostream& os) const;
};

// Accumulates per-clip metrics over a test set. Frame scores are the
// spatial max of the (fused) map; frame labels come from key-point
// positivity. Spatial distances are averaged per clip first, then over
// clips.
class Evaluator {
public:
    Evaluator(InstrumentVocabulary vocab, int input_height, int input_width, ArgmaxPolicy policy = {});

    void add_clip(const ActivationMap& map, const KeyPointAnnotationSet& anno);
    EvalReport report() const;

private:
    InstrumentVocabulary vocab_;
    int height_, width_;
    ArgmaxPolicy policy_;
    struct PerClass {
        double auc_sum = 0.0;
        int auc_clips = 0;
        int skipped = 0;
        double dist_sum = 0.0;  // sum of per-clip mean distances
        int dist_clips = 0;
        int positive_frames = 0;
    };
    std::vector<PerClass> per_class_;
};

}  // namespace avact
