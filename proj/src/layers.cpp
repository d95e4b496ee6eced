#include "avact/layers.hpp"

#include <algorithm>
#include <cmath>

#include "avact/kernels.hpp"

namespace avact {

namespace {

// View helpers: spatial size = product of dims after the channel dim.
std::size_t spatial_size(const Tensor& x) {
    std::size_t s = 1;
    for (std::size_t i = 2; i < x.rank(); ++i) s *= x.dim(i);
    return s;
}

}  // namespace

void Layer::zero_grad() {
    std::vector<Tensor*> p, g;
    collect_params(p, g);
    for (Tensor* t : g) t->fill(0.0);
}

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(int in_ch_, int out_ch_, int k_, int stride_, int pad_)
    : in_ch(in_ch_),
      out_ch(out_ch_),
      k(k_),
      stride(stride_),
      pad(pad_),
      w({static_cast<std::size_t>(out_ch_), static_cast<std::size_t>(in_ch_), static_cast<std::size_t>(k_),
         static_cast<std::size_t>(k_)}),
      b({static_cast<std::size_t>(out_ch_)}),
      gw(w.dims()),
      gb(b.dims()) {}

void Conv2d::collect_params(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
    params.push_back(&w);
    grads.push_back(&gw);
    params.push_back(&b);
    grads.push_back(&gb);
}

Tensor Conv2d::forward(const Tensor& x, bool) {
    if (x.rank() != 4) throw ShapeMismatch("conv2d expects [N,C,H,W]");
    if (x.dim(1) != static_cast<std::size_t>(in_ch))
        throw ChannelMismatch("conv2d expects " + std::to_string(in_ch) + " channels, got " +
                              std::to_string(x.dim(1)));
    const std::size_t N = x.dim(0), H = x.dim(2), W = x.dim(3);
    if (H + 2 * pad < static_cast<std::size_t>(k) || W + 2 * pad < static_cast<std::size_t>(k))
        throw ShapeMismatch("conv2d input smaller than receptive field");
    const std::size_t OH = out_extent(H, k, stride, pad), OW = out_extent(W, k, stride, pad);
    Tensor y({N, static_cast<std::size_t>(out_ch), OH, OW});
    for (std::size_t n = 0; n < N; ++n)
        for (int oc = 0; oc < out_ch; ++oc)
            for (std::size_t oy = 0; oy < OH; ++oy)
                for (std::size_t ox = 0; ox < OW; ++ox) {
                    double acc = b[static_cast<std::size_t>(oc)];
                    const long iy0 = static_cast<long>(oy) * stride - pad;
                    const long ix0 = static_cast<long>(ox) * stride - pad;
                    for (int ic = 0; ic < in_ch; ++ic)
                        for (int ky = 0; ky < k; ++ky) {
                            const long iy = iy0 + ky;
                            if (iy < 0 || iy >= static_cast<long>(H)) continue;
                            const double* wrow = &w.at(oc, ic, ky, 0);
                            const double* xrow = &x.at(n, ic, static_cast<std::size_t>(iy), 0);
                            if (ix0 >= 0 && ix0 + k <= static_cast<long>(W)) {
                                acc += kern::dot(wrow, xrow + ix0, static_cast<std::size_t>(k));
                            } else {
                                for (int kx = 0; kx < k; ++kx) {
                                    const long ix = ix0 + kx;
                                    if (ix >= 0 && ix < static_cast<long>(W)) acc += wrow[kx] * xrow[ix];
                                }
                            }
                        }
                    y.at(n, oc, oy, ox) = acc;
                }
    x_ = x;
    return y;
}

Tensor Conv2d::backward(const Tensor& gy) {
    const std::size_t N = x_.dim(0), H = x_.dim(2), W = x_.dim(3);
    const std::size_t OH = gy.dim(2), OW = gy.dim(3);
    Tensor gx(x_.dims());
    for (std::size_t n = 0; n < N; ++n)
        for (int oc = 0; oc < out_ch; ++oc)
            for (std::size_t oy = 0; oy < OH; ++oy)
                for (std::size_t ox = 0; ox < OW; ++ox) {
                    const double g = gy.at(n, oc, oy, ox);
                    if (g == 0.0) continue;
                    gb[static_cast<std::size_t>(oc)] += g;
                    const long iy0 = static_cast<long>(oy) * stride - pad;
                    const long ix0 = static_cast<long>(ox) * stride - pad;
                    for (int ic = 0; ic < in_ch; ++ic)
                        for (int ky = 0; ky < k; ++ky) {
                            const long iy = iy0 + ky;
                            if (iy < 0 || iy >= static_cast<long>(H)) continue;
                            const double* wrow = &w.at(oc, ic, ky, 0);
                            double* gwrow = &gw.at(oc, ic, ky, 0);
                            const double* xrow = &x_.at(n, ic, static_cast<std::size_t>(iy), 0);
                            double* gxrow = &gx.at(n, ic, static_cast<std::size_t>(iy), 0);
                            if (ix0 >= 0 && ix0 + k <= static_cast<long>(W)) {
                                kern::axpy(g, xrow + ix0, gwrow, static_cast<std::size_t>(k));
                                kern::axpy(g, wrow, gxrow + ix0, static_cast<std::size_t>(k));
                            } else {
                                for (int kx = 0; kx < k; ++kx) {
                                    const long ix = ix0 + kx;
                                    if (ix < 0 || ix >= static_cast<long>(W)) continue;
                                    gwrow[kx] += g * xrow[ix];
                                    gxrow[ix] += g * wrow[kx];
                                }
                            }
                        }
                }
    return gx;
}

// ---------------------------------------------------------------- Conv1d

Conv1d::Conv1d(int in_ch_, int out_ch_, int k_, int stride_, int pad_)
    : in_ch(in_ch_),
      out_ch(out_ch_),
      k(k_),
      stride(stride_),
      pad(pad_),
      w({static_cast<std::size_t>(out_ch_), static_cast<std::size_t>(in_ch_), static_cast<std::size_t>(k_)}),
      b({static_cast<std::size_t>(out_ch_)}),
      gw(w.dims()),
      gb(b.dims()) {}

void Conv1d::collect_params(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
    params.push_back(&w);
    grads.push_back(&gw);
    params.push_back(&b);
    grads.push_back(&gb);
}

Tensor Conv1d::forward(const Tensor& x, bool) {
    if (x.rank() != 3) throw ShapeMismatch("conv1d expects [N,C,T]");
    if (x.dim(1) != static_cast<std::size_t>(in_ch))
        throw ChannelMismatch("conv1d expects " + std::to_string(in_ch) + " channels, got " +
                              std::to_string(x.dim(1)));
    const std::size_t N = x.dim(0), T = x.dim(2);
    if (T + 2 * pad < static_cast<std::size_t>(k)) throw ShapeMismatch("conv1d input shorter than receptive field");
    const std::size_t OT = Conv2d::out_extent(T, k, stride, pad);
    Tensor y({N, static_cast<std::size_t>(out_ch), OT});
    for (std::size_t n = 0; n < N; ++n)
        for (int oc = 0; oc < out_ch; ++oc)
            for (std::size_t ot = 0; ot < OT; ++ot) {
                double acc = b[static_cast<std::size_t>(oc)];
                const long it0 = static_cast<long>(ot) * stride - pad;
                for (int ic = 0; ic < in_ch; ++ic) {
                    const double* wrow = &w.at(oc, ic, 0);
                    const double* xrow = &x.at(n, ic, 0);
                    if (it0 >= 0 && it0 + k <= static_cast<long>(T)) {
                        acc += kern::dot(wrow, xrow + it0, static_cast<std::size_t>(k));
                    } else {
                        for (int kt = 0; kt < k; ++kt) {
                            const long it = it0 + kt;
                            if (it >= 0 && it < static_cast<long>(T)) acc += wrow[kt] * xrow[it];
                        }
                    }
                }
                y.at(n, oc, ot) = acc;
            }
    x_ = x;
    return y;
}

Tensor Conv1d::backward(const Tensor& gy) {
    const std::size_t N = x_.dim(0), T = x_.dim(2), OT = gy.dim(2);
    Tensor gx(x_.dims());
    for (std::size_t n = 0; n < N; ++n)
        for (int oc = 0; oc < out_ch; ++oc)
            for (std::size_t ot = 0; ot < OT; ++ot) {
                const double g = gy.at(n, oc, ot);
                if (g == 0.0) continue;
                gb[static_cast<std::size_t>(oc)] += g;
                const long it0 = static_cast<long>(ot) * stride - pad;
                for (int ic = 0; ic < in_ch; ++ic) {
                    const double* wrow = &w.at(oc, ic, 0);
                    double* gwrow = &gw.at(oc, ic, 0);
                    const double* xrow = &x_.at(n, ic, 0);
                    double* gxrow = &gx.at(n, ic, 0);
                    if (it0 >= 0 && it0 + k <= static_cast<long>(T)) {
                        kern::axpy(g, xrow + it0, gwrow, static_cast<std::size_t>(k));
                        kern::axpy(g, wrow, gxrow + it0, static_cast<std::size_t>(k));
                    } else {
                        for (int kt = 0; kt < k; ++kt) {
                            const long it = it0 + kt;
                            if (it < 0 || it >= static_cast<long>(T)) continue;
                            gwrow[kt] += g * xrow[it];
                            gxrow[it] += g * wrow[kt];
                        }
                    }
                }
            }
    return gx;
}

// ------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(int channels_, double eps_, double momentum_)
    : channels(channels_),
      eps(eps_),
      momentum(momentum_),
      gamma({static_cast<std::size_t>(channels_)}, 1.0),
      beta({static_cast<std::size_t>(channels_)}),
      ggamma(gamma.dims()),
      gbeta(beta.dims()),
      running_mean(gamma.dims()),
      running_var(gamma.dims(), 1.0) {}

void BatchNorm::collect_params(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
    params.push_back(&gamma);
    grads.push_back(&ggamma);
    params.push_back(&beta);
    grads.push_back(&gbeta);
}

Tensor BatchNorm::forward(const Tensor& x, bool train) {
    if (x.rank() < 3) throw ShapeMismatch("batchnorm expects [N,C,...]");
    if (x.dim(1) != static_cast<std::size_t>(channels)) throw ChannelMismatch("batchnorm channel count");
    const std::size_t N = x.dim(0), C = x.dim(1), S = spatial_size(x);
    const std::size_t M = N * S;
    Tensor y(x.dims());
    xhat_ = Tensor(x.dims());
    invstd_.assign(C, 0.0);
    train_mode_ = train;
    for (std::size_t c = 0; c < C; ++c) {
        double mean, var;
        if (train) {
            double acc = 0.0;
            for (std::size_t n = 0; n < N; ++n) acc += kern::sum(&x[(n * C + c) * S], S);
            mean = acc / static_cast<double>(M);
            double acc2 = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                const double* p = &x[(n * C + c) * S];
                for (std::size_t s = 0; s < S; ++s) {
                    const double d = p[s] - mean;
                    acc2 += d * d;
                }
            }
            var = acc2 / static_cast<double>(M);
            running_mean[c] = (1.0 - momentum) * running_mean[c] + momentum * mean;
            running_var[c] = (1.0 - momentum) * running_var[c] + momentum * var;
        } else {
            mean = running_mean[c];
            var = running_var[c];
        }
        const double inv = 1.0 / std::sqrt(var + eps);
        invstd_[c] = inv;
        const double g = gamma[c], bt = beta[c];
        for (std::size_t n = 0; n < N; ++n) {
            const double* p = &x[(n * C + c) * S];
            double* ph = &xhat_[(n * C + c) * S];
            double* py = &y[(n * C + c) * S];
            for (std::size_t s = 0; s < S; ++s) {
                ph[s] = (p[s] - mean) * inv;
                py[s] = g * ph[s] + bt;
            }
        }
    }
    return y;
}

Tensor BatchNorm::backward(const Tensor& gy) {
    const std::size_t N = gy.dim(0), C = gy.dim(1), S = spatial_size(gy);
    const double M = static_cast<double>(N * S);
    Tensor gx(gy.dims());
    for (std::size_t c = 0; c < C; ++c) {
        double sum_gy = 0.0, sum_gy_xhat = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double* pg = &gy[(n * C + c) * S];
            const double* ph = &xhat_[(n * C + c) * S];
            sum_gy += kern::sum(pg, S);
            sum_gy_xhat += kern::dot(pg, ph, S);
        }
        gbeta[c] += sum_gy;
        ggamma[c] += sum_gy_xhat;
        const double g = gamma[c], inv = invstd_[c];
        for (std::size_t n = 0; n < N; ++n) {
            const double* pg = &gy[(n * C + c) * S];
            const double* ph = &xhat_[(n * C + c) * S];
            double* px = &gx[(n * C + c) * S];
            if (train_mode_) {
                for (std::size_t s = 0; s < S; ++s)
                    px[s] = g * inv * (pg[s] - sum_gy / M - ph[s] * sum_gy_xhat / M);
            } else {
                for (std::size_t s = 0; s < S; ++s) px[s] = g * inv * pg[s];
            }
        }
    }
    return gx;
}

// --------------------------------------------------------------- MaxPool

MaxPool::MaxPool(int window_) : window(window_) {
    if (window < 1) throw ConfigError("pool window must be >= 1");
}

Tensor MaxPool::forward(const Tensor& x, bool) {
    in_dims_ = x.dims();
    if (x.rank() == 4) {
        const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
        const std::size_t OH = H / window, OW = W / window;
        if (OH == 0 || OW == 0) throw ShapeMismatch("maxpool input smaller than window");
        Tensor y({N, C, OH, OW});
        argmax_.assign(y.size(), 0);
        std::size_t oi = 0;
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t oy = 0; oy < OH; ++oy)
                    for (std::size_t ox = 0; ox < OW; ++ox, ++oi) {
                        double best = -1e300;
                        std::size_t best_idx = 0;
                        for (int dy = 0; dy < window; ++dy)
                            for (int dx = 0; dx < window; ++dx) {
                                const std::size_t iy = oy * window + dy, ix = ox * window + dx;
                                const std::size_t idx = ((n * C + c) * H + iy) * W + ix;
                                if (x[idx] > best) {
                                    best = x[idx];
                                    best_idx = idx;
                                }
                            }
                        y[oi] = best;
                        argmax_[oi] = best_idx;
                    }
        return y;
    }
    if (x.rank() == 3) {
        const std::size_t N = x.dim(0), C = x.dim(1), T = x.dim(2);
        const std::size_t OT = T / window;
        if (OT == 0) throw ShapeMismatch("maxpool input shorter than window");
        Tensor y({N, C, OT});
        argmax_.assign(y.size(), 0);
        std::size_t oi = 0;
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t ot = 0; ot < OT; ++ot, ++oi) {
                    double best = -1e300;
                    std::size_t best_idx = 0;
                    for (int dt = 0; dt < window; ++dt) {
                        const std::size_t idx = (n * C + c) * T + ot * window + dt;
                        if (x[idx] > best) {
                            best = x[idx];
                            best_idx = idx;
                        }
                    }
                    y[oi] = best;
                    argmax_[oi] = best_idx;
                }
        return y;
    }
    throw ShapeMismatch("maxpool expects rank 3 or 4");
}

Tensor MaxPool::backward(const Tensor& gy) {
    Tensor gx(in_dims_);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[argmax_[i]] += gy[i];
    return gx;
}

// ------------------------------------------------------------------- LRN

LRN::LRN(int size_, double alpha_, double beta_, double k_) : size(size_), alpha(alpha_), beta(beta_), k(k_) {}

Tensor LRN::forward(const Tensor& x, bool) {
    if (x.rank() != 4) throw ShapeMismatch("lrn expects [N,C,H,W]");
    const std::size_t N = x.dim(0), C = x.dim(1), S = spatial_size(x);
    const int half = (size - 1) / 2;
    Tensor y(x.dims());
    denom_ = Tensor(x.dims());
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c) {
            const long lo = std::max<long>(0, static_cast<long>(c) - half);
            const long hi = std::min<long>(static_cast<long>(C) - 1, static_cast<long>(c) + half);
            for (std::size_t s = 0; s < S; ++s) {
                double acc = 0.0;
                for (long cc = lo; cc <= hi; ++cc) {
                    const double v = x[(n * C + static_cast<std::size_t>(cc)) * S + s];
                    acc += v * v;
                }
                const double d = k + alpha / size * acc;
                denom_[(n * C + c) * S + s] = d;
                y[(n * C + c) * S + s] = x[(n * C + c) * S + s] * std::pow(d, -beta);
            }
        }
    x_ = x;
    return y;
}

Tensor LRN::backward(const Tensor& gy) {
    const std::size_t N = x_.dim(0), C = x_.dim(1), S = spatial_size(x_);
    const int half = (size - 1) / 2;
    Tensor gx(x_.dims());
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c) {
            const long lo = std::max<long>(0, static_cast<long>(c) - half);
            const long hi = std::min<long>(static_cast<long>(C) - 1, static_cast<long>(c) + half);
            for (std::size_t s = 0; s < S; ++s) {
                const std::size_t ci = (n * C + c) * S + s;
                double acc = gy[ci] * std::pow(denom_[ci], -beta);
                // cross terms: every channel whose window contains c
                double cross = 0.0;
                for (long cc = lo; cc <= hi; ++cc) {
                    const std::size_t oi = (n * C + static_cast<std::size_t>(cc)) * S + s;
                    cross += gy[oi] * x_[oi] * std::pow(denom_[oi], -beta - 1.0);
                }
                acc -= 2.0 * alpha * beta / size * x_[ci] * cross;
                gx[ci] = acc;
            }
        }
    return gx;
}

// --------------------------------------------------------------- Dropout

Dropout::Dropout(double rate_, std::uint64_t seed) : rate(rate_), rng_(seed) {
    if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0,1)");
}

Tensor Dropout::forward(const Tensor& x, bool train) {
    train_mode_ = train;
    if (!train || rate == 0.0) return x;
    Tensor y(x.dims());
    mask_.assign(x.size(), 0.0);
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < x.size(); ++i) {
        mask_[i] = keep(rng_) ? scale : 0.0;
        y[i] = x[i] * mask_[i];
    }
    return y;
}

Tensor Dropout::backward(const Tensor& gy) {
    if (!train_mode_ || rate == 0.0) return gy;
    Tensor gx(gy.dims());
    kern::mul(gy.data(), mask_.data(), gx.data(), gy.size());
    return gx;
}

// ------------------------------------------------------------------ ReLU

Tensor ReLU::forward(const Tensor& x, bool) {
    Tensor y(x.dims());
    pos_.assign(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0) {
            y[i] = x[i];
            pos_[i] = 1;
        }
    }
    return y;
}

Tensor ReLU::backward(const Tensor& gy) {
    Tensor gx(gy.dims());
    for (std::size_t i = 0; i < gy.size(); ++i)
        if (pos_[i]) gx[i] = gy[i];
    return gx;
}

// --------------------------------------------------------------- Sigmoid

Tensor Sigmoid::forward(const Tensor& x, bool) {
    Tensor y(x.dims());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
    y_ = y;
    return y;
}

Tensor Sigmoid::backward(const Tensor& gy) {
    Tensor gx(gy.dims());
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] = gy[i] * y_[i] * (1.0 - y_[i]);
    return gx;
}

void init_conv(Tensor& w, std::mt19937_64& rng) {
    std::size_t fan_in = 1;
    for (std::size_t i = 1; i < w.rank(); ++i) fan_in *= w.dim(i);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> d(-bound, bound);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = d(rng);
}

}  // namespace avact
