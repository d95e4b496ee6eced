#pragma once

#include <string>

#include "avact/tensor.hpp"

namespace avact {

enum class Modality { object, action, fused, sound };

std::string modality_name(Modality m);

// 4-D confidence tensor [class g, time t, row i, col j], values in [0,1].
struct ActivationMap {
    Tensor data;  // [G, T, I, J]
    double fps = 0.0;
    int stride = 1;  // input pixels per map cell
    Modality modality = Modality::action;

    void validate() const;
    std::size_t classes() const { return data.dim(0); }
    std::size_t times() const { return data.dim(1); }
    std::size_t rows() const { return data.dim(2); }
    std::size_t cols() const { return data.dim(3); }
};

// 2-D confidence tensor [class g, time t], values in [0,1].
struct SoundActivation {
    Tensor data;  // [G, T]
    double fps = 0.0;

    void validate() const;
    std::size_t classes() const { return data.dim(0); }
    std::size_t times() const { return data.dim(1); }
};

// Thresholded counterpart with {0,1} entries.
struct BinaryMask {
    Tensor data;
    double threshold = 0.5;
    Modality source_modality = Modality::object;
};

}  // namespace avact
