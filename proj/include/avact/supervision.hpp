#pragma once

#include <optional>
#include <string>

#include "avact/activation.hpp"
#include "avact/vocabulary.hpp"

namespace avact {

enum class TargetMode { VT, OT, ST, SOT };

TargetMode parse_target_mode(const std::string& name);
std::string target_mode_name(TargetMode mode);

// Supervision scheme for action training: which teacher streams build
// the target and at which binarization thresholds.
struct TargetSpec {
    TargetMode mode = TargetMode::VT;
    std::optional<double> sound_threshold;   // v, required for ST/SOT
    std::optional<double> object_threshold;  // u, required for OT/SOT

    void validate() const;
    // e.g. SOT with v=0.5, u=0.3 -> "SOT0503"
    std::string canonical_name() const;
};

// Whether BCE compares per map cell or after a spatial max.
enum class ComparisonMode { spatial_map, spatial_max };

struct Target {
    Tensor data;  // [G,T] for spatial_max, [G,T,I,J] for spatial_map
    ComparisonMode comparison;
};

// Inclusive threshold: entry = 1 iff source >= threshold.
Tensor binarize(const Tensor& source, double threshold);
BinaryMask binarize(const ActivationMap& source, double threshold);
BinaryMask binarize(const SoundActivation& source, double threshold);

// Builds the training target for one clip. obj is required for OT/SOT,
// snd for ST/SOT; their T axes must already be aligned to the action
// map's.
Target build_target(const TargetSpec& spec, const ClipTags& tags, const ActivationMap* obj,
                    const SoundActivation* snd);

// Mean binary cross-entropy with predictions clipped to [1e-7, 1-1e-7].
double bce_loss(const Tensor& p, const Tensor& q);
// d(mean BCE)/dp; zero where the clip is active.
Tensor bce_grad(const Tensor& p, const Tensor& q);

// Per-class max over (i, j) of a [G, I, J] map frame.
Tensor spatial_max(const Tensor& map_frame);

// Batched spatial max with gradient routing to the (first, row-major)
// argmax cell: [N, G, I, J] <-> [N, G].
class SpatialMaxPool {
public:
    Tensor forward(const Tensor& maps);
    Tensor backward(const Tensor& gy) const;

private:
    std::vector<std::size_t> argmax_;
    std::vector<std::size_t> in_dims_;
};

inline constexpr double kBceEps = 1e-7;

}  // namespace avact
