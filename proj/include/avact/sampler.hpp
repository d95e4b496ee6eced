#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "avact/clip.hpp"

namespace avact {

// Epoch sampler: each draw picks a video without replacement, then one
// of its 12 sub-clips uniformly. The sub-clip's 10 frames form the
// mini-batch. Single-owner; one sampler per training run.
class MinibatchSampler {
public:
    struct Draw {
        std::size_t clip;
        int subclip;
    };

    MinibatchSampler(std::size_t n_clips, std::uint64_t seed);

    // Throws EpochExhausted after n_clips draws.
    Draw next();
    // Reshuffles for a new epoch; the sequence stays a pure function of
    // the construction seed and the number of epochs started.
    void start_epoch();

    std::size_t draws_left() const { return order_.size() - pos_; }
    std::size_t epoch() const { return epoch_; }

private:
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
    std::size_t epoch_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace avact
