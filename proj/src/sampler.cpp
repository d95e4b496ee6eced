#include "avact/sampler.hpp"

#include <algorithm>
#include <numeric>

#include "avact/errors.hpp"

namespace avact {

MinibatchSampler::MinibatchSampler(std::size_t n_clips, std::uint64_t seed) : rng_(seed) {
    if (n_clips == 0) throw ConfigError("sampler needs at least one clip");
    order_.resize(n_clips);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    start_epoch();
    epoch_ = 0;
}

void MinibatchSampler::start_epoch() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    pos_ = 0;
    ++epoch_;
}

MinibatchSampler::Draw MinibatchSampler::next() {
    if (pos_ >= order_.size()) throw EpochExhausted("all videos consumed this epoch");
    Draw d;
    d.clip = order_[pos_++];
    d.subclip = static_cast<int>(std::uniform_int_distribution<int>(0, kSubClipCount - 1)(rng_));
    return d;
}

}  // namespace avact
