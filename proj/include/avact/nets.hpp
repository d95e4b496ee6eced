#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avact/layers.hpp"
#include "avact/mel.hpp"

namespace avact {

// Named persistent tensor (parameter or BN running statistic).
struct StateRef {
    std::string name;
    Tensor* value;
};

// Trainable parameter with its gradient accumulator; `frozen` points at
// the owning layer's freeze flag so the optimizer can skip it.
struct ParamRef {
    std::string name;
    Tensor* value;
    Tensor* grad;
    const bool* frozen;
};

// ------------------------------------------------------------ visual net

struct VisualLayerSpec {
    int out_ch;
    int k;
    int stride;
    int pad;
    bool lrn = false;
    int pool = 0;  // 0 = none, else window==stride
    double dropout = 0.0;
    bool bn = false;
    bool relu = false;  // mini preset only; the full-scale tables list none
    bool sigmoid = false;
};

struct VisualNetConfig {
    int in_channels = 3;  // 3 (object) or 10 (action)
    int classes = 9;
    int early_convs = 5;  // freeze / pretrained boundary
    std::vector<VisualLayerSpec> layers;

    // Full-scale architecture. Conv6 keeps pad 1 so the total spatial
    // stride stays exactly 32.
    static VisualNetConfig paper(int in_channels, int classes = 9, bool lrn = true);
    // Reduced architecture for desk-scale runs, total stride 16.
    static VisualNetConfig mini(int in_channels, int classes);

    int total_stride() const;
    // Per-axis output extent from the layer arithmetic.
    std::size_t out_extent(std::size_t input) const;
    std::string hash() const;
};

class VisualNet {
public:
    // Deterministic init from seed; if pretrained_early is given, the
    // early conv weights are loaded from that directory
    // (conv<i>.w.tnsr / conv<i>.b.tnsr) and must match shapes.
    VisualNet(VisualNetConfig cfg, std::uint64_t seed,
              const std::optional<std::filesystem::path>& pretrained_early = std::nullopt);

    // [N, C, H, W] -> per-frame map [N, G, I, J], values in (0,1).
    Tensor forward(const Tensor& x, bool train);
    Tensor backward(const Tensor& gy);
    void zero_grad();

    void set_early_frozen(bool frozen);
    std::vector<ParamRef> params();
    std::vector<StateRef> state();
    const VisualNetConfig& config() const { return cfg_; }
    // Conv1 weights [out_ch, in_ch, k, k] (analysis entry point).
    const Tensor& conv1_weights() const;
    // Conv1 linear response only (pre-LRN/pool), for filter analysis.
    Tensor conv1_response(const Tensor& x) const;

private:
    VisualNetConfig cfg_;
    std::vector<std::unique_ptr<Layer>> layers_;
    std::vector<Conv2d*> convs_;
};

// ------------------------------------------------------------- sound net

struct SoundNetConfig {
    int mel_bands = 128;
    int classes = 9;
    int early_ch = 256;   // Conv1/Conv2 filters per scale
    int late_ch = 512;    // Conv3/Conv4 filters
    int pool = 4;         // two temporal pools -> total stride 16
    double dropout = 0.5;
    bool relu = false;    // mini preset only

    static SoundNetConfig paper(int classes = 9);
    static SoundNetConfig mini(int classes);

    int total_stride() const { return pool * pool; }
    std::string hash() const;
};

class SoundNet {
public:
    SoundNet(SoundNetConfig cfg, std::uint64_t seed);

    // Three mel scales [N, mel_bands, T] -> frame output [N, G, T/16],
    // values in (0,1). Clip scores are the temporal average.
    Tensor forward(const std::array<Tensor, 3>& scales, bool train);
    // Gradient wrt the frame output; per-scale input grads discarded.
    void backward(const Tensor& gy);
    void zero_grad();

    std::vector<ParamRef> params();
    std::vector<StateRef> state();
    const SoundNetConfig& config() const { return cfg_; }

private:
    struct Tower {
        std::vector<std::unique_ptr<Layer>> layers;
    };
    SoundNetConfig cfg_;
    std::array<Tower, 3> towers_;
    std::vector<std::unique_ptr<Layer>> late_;
    std::vector<std::size_t> tower_out_ch_;
};

// Temporal global average: [N, G, T] -> [N, G].
Tensor temporal_average(const Tensor& frame_out);
// Distributes clip-score gradients back over time.
Tensor temporal_average_backward(const Tensor& gclip, std::size_t T);

}  // namespace avact
