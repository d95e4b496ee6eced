#pragma once

#include <array>
#include <vector>

#include "avact/tensor.hpp"

namespace avact {

// Three log-mel spectrograms sharing one hop (and therefore one T), at
// increasing analysis window sizes.
struct MelStack {
    std::array<Tensor, 3> scales;  // each [128, T]
    std::array<int, 3> window_sizes{512, 2048, 8192};
    int hop = 512;
    int sample_rate = 16000;

    std::size_t frames() const { return scales[0].dim(1); }
};

struct MelParams {
    std::array<int, 3> window_sizes{512, 2048, 8192};
    int hop = 512;
    int sample_rate = 16000;
    int n_mels = 128;
    double floor = 1e-10;  // log(max(power, floor))
};

// 16 kHz mono PCM -> 3-scale log-mel stack at 31.25 FPS
// (T = floor(n_samples / hop); windows centered, reflection padded).
// Throws AudioTooShort when the input is shorter than the largest window.
MelStack extract_mel_3scale(const std::vector<float>& audio, const MelParams& params = {});

}  // namespace avact
