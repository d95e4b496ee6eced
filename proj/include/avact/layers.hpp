#pragma once

#include <memory>
#include <random>
#include <vector>

#include "avact/tensor.hpp"

namespace avact {

// Minibatch layouts: rank-4 [N, C, H, W] for the visual nets, rank-3
// [N, C, T] for the sound net. Each layer caches what its backward pass
// needs; backward returns the input gradient and accumulates parameter
// gradients until zero_grad().
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x, bool train) = 0;
    virtual Tensor backward(const Tensor& gy) = 0;
    virtual void collect_params(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
        (void)params;
        (void)grads;
    }
    virtual const char* kind() const = 0;
    void zero_grad();
};

class Conv2d : public Layer {
public:
    Conv2d(int in_ch, int out_ch, int k, int stride, int pad);
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    void collect_params(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) override;
    const char* kind() const override { return "conv2d"; }

    static std::size_t out_extent(std::size_t n, int k, int stride, int pad) {
        return (n + 2 * static_cast<std::size_t>(pad) - static_cast<std::size_t>(k)) /
                   static_cast<std::size_t>(stride) +
               1;
    }

    int in_ch, out_ch, k, stride, pad;
    Tensor w, b, gw, gb;
    bool frozen = false;  // freeze schedule: grads still computed, optimizer skips

private:
    Tensor x_;
};

class Conv1d : public Layer {
public:
    Conv1d(int in_ch, int out_ch, int k, int stride, int pad);
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    void collect_params(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) override;
    const char* kind() const override { return "conv1d"; }

    int in_ch, out_ch, k, stride, pad;
    Tensor w, b, gw, gb;
    bool frozen = false;

private:
    Tensor x_;
};

// Batch normalization over (N, spatial) per channel; works on rank-3
// and rank-4 inputs. Eval mode uses the stored running statistics.
class BatchNorm : public Layer {
public:
    explicit BatchNorm(int channels, double eps = 1e-5, double momentum = 0.1);
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    void collect_params(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) override;
    const char* kind() const override { return "batchnorm"; }

    int channels;
    double eps, momentum;
    Tensor gamma, beta, ggamma, gbeta;
    Tensor running_mean, running_var;
    bool frozen = false;

private:
    Tensor xhat_;
    std::vector<double> invstd_;
    bool train_mode_ = false;
};

// Max pooling, window == stride, floor semantics (trailing remainder
// dropped). Rank-4: window x window spatially; rank-3: window over time.
class MaxPool : public Layer {
public:
    explicit MaxPool(int window);
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    const char* kind() const override { return "maxpool"; }

    int window;

private:
    std::vector<std::size_t> argmax_;  // flat source index per output element
    std::vector<std::size_t> in_dims_;
};

// Across-channel local response normalization (AlexNet lineage constants).
class LRN : public Layer {
public:
    explicit LRN(int size = 5, double alpha = 1e-4, double beta = 0.75, double k = 2.0);
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    const char* kind() const override { return "lrn"; }

    int size;
    double alpha, beta, k;

private:
    Tensor x_, denom_;  // denom = k + alpha/size * window sum of squares
};

// Inverted dropout; identity in eval mode. Mask sequence is a pure
// function of the seed.
class Dropout : public Layer {
public:
    explicit Dropout(double rate = 0.5, std::uint64_t seed = 0);
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    const char* kind() const override { return "dropout"; }
    void reseed(std::uint64_t seed) { rng_.seed(seed); }

    double rate;

private:
    std::mt19937_64 rng_;
    std::vector<double> mask_;
    bool train_mode_ = false;
};

class ReLU : public Layer {
public:
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    const char* kind() const override { return "relu"; }

private:
    std::vector<std::uint8_t> pos_;
};

class Sigmoid : public Layer {
public:
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& gy) override;
    const char* kind() const override { return "sigmoid"; }

private:
    Tensor y_;
};

// Fan-in-scaled uniform init, zero biases; deterministic given the rng.
void init_conv(Tensor& w, std::mt19937_64& rng);

}  // namespace avact
