#include "avact/nets.hpp"

#include <sstream>

namespace avact {

namespace {

std::string fnv_hash(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------- visual config

VisualNetConfig VisualNetConfig::paper(int in_channels, int classes, bool lrn) {
    VisualNetConfig cfg;
    cfg.in_channels = in_channels;
    cfg.classes = classes;
    cfg.early_convs = 5;
    cfg.layers = {
        {96, 7, 2, 3, lrn, 2},
        {256, 5, 2, 2, false, 2},
        {512, 3, 1, 1},
        {512, 3, 1, 1},
        {512, 3, 1, 1, false, 2},
        {2048, 3, 1, 1, false, 0, 0.5},
        {1024, 1, 1, 0, false, 0, 0.5},
        {classes, 1, 1, 0, false, 0, 0.0, false, false, true},
    };
    return cfg;
}

VisualNetConfig VisualNetConfig::mini(int in_channels, int classes) {
    VisualNetConfig cfg;
    cfg.in_channels = in_channels;
    cfg.classes = classes;
    cfg.early_convs = 3;
    cfg.layers = {
        {12, 5, 2, 2, false, 2, 0.0, true, true},
        {24, 3, 1, 1, false, 2, 0.0, true, true},
        {32, 3, 1, 1, false, 2, 0.0, true, true},
        {32, 1, 1, 0, false, 0, 0.0, true, true},
        {classes, 1, 1, 0, false, 0, 0.0, false, false, true},
    };
    return cfg;
}

int VisualNetConfig::total_stride() const {
    int s = 1;
    for (const auto& l : layers) {
        s *= l.stride;
        if (l.pool > 0) s *= l.pool;
    }
    return s;
}

std::size_t VisualNetConfig::out_extent(std::size_t input) const {
    std::size_t n = input;
    for (const auto& l : layers) {
        n = Conv2d::out_extent(n, l.k, l.stride, l.pad);
        if (l.pool > 0) n /= static_cast<std::size_t>(l.pool);
    }
    return n;
}

std::string VisualNetConfig::hash() const {
    std::ostringstream os;
    os << "visual:" << in_channels << ':' << classes << ':' << early_convs;
    for (const auto& l : layers)
        os << '|' << l.out_ch << ',' << l.k << ',' << l.stride << ',' << l.pad << ',' << l.lrn << ','
           << l.pool << ',' << l.dropout << ',' << l.bn << ',' << l.relu << ',' << l.sigmoid;
    return fnv_hash(os.str());
}

// ------------------------------------------------------------ visual net

VisualNet::VisualNet(VisualNetConfig cfg, std::uint64_t seed,
                     const std::optional<std::filesystem::path>& pretrained_early)
    : cfg_(std::move(cfg)) {
    std::mt19937_64 rng(seed);
    int in_ch = cfg_.in_channels;
    int idx = 0;
    for (const auto& spec : cfg_.layers) {
        auto conv = std::make_unique<Conv2d>(in_ch, spec.out_ch, spec.k, spec.stride, spec.pad);
        init_conv(conv->w, rng);
        convs_.push_back(conv.get());
        layers_.push_back(std::move(conv));
        if (spec.bn) layers_.push_back(std::make_unique<BatchNorm>(spec.out_ch));
        if (spec.relu) layers_.push_back(std::make_unique<ReLU>());
        if (spec.lrn) layers_.push_back(std::make_unique<LRN>());
        if (spec.pool > 0) layers_.push_back(std::make_unique<MaxPool>(spec.pool));
        if (spec.dropout > 0) layers_.push_back(std::make_unique<Dropout>(spec.dropout, seed ^ (0x9e37u + idx)));
        if (spec.sigmoid) layers_.push_back(std::make_unique<Sigmoid>());
        in_ch = spec.out_ch;
        ++idx;
    }
    if (pretrained_early) {
        const int n_early = std::min<int>(cfg_.early_convs, static_cast<int>(convs_.size()));
        for (int i = 0; i < n_early; ++i) {
            auto wpath = *pretrained_early / ("conv" + std::to_string(i + 1) + ".w.tnsr");
            auto bpath = *pretrained_early / ("conv" + std::to_string(i + 1) + ".b.tnsr");
            Tensor w = load_tensor(wpath), b = load_tensor(bpath);
            if (w.dims() != convs_[i]->w.dims() || b.dims() != convs_[i]->b.dims())
                throw WeightShapeMismatch("conv" + std::to_string(i + 1) + " in " +
                                          pretrained_early->string());
            convs_[i]->w = std::move(w);
            convs_[i]->b = std::move(b);
        }
    }
}

Tensor VisualNet::forward(const Tensor& x, bool train) {
    Tensor y = x;
    for (auto& l : layers_) y = l->forward(y, train);
    return y;
}

Tensor VisualNet::backward(const Tensor& gy) {
    Tensor g = gy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
}

void VisualNet::zero_grad() {
    for (auto& l : layers_) l->zero_grad();
}

void VisualNet::set_early_frozen(bool frozen) {
    for (int i = 0; i < cfg_.early_convs && i < static_cast<int>(convs_.size()); ++i)
        convs_[i]->frozen = frozen;
}

namespace {

void collect_named(std::vector<std::unique_ptr<Layer>>& layers, const std::string& prefix,
                   std::vector<ParamRef>* params, std::vector<StateRef>* state) {
    int conv_i = 0, bn_i = 0;
    for (auto& l : layers) {
        if (auto* c2 = dynamic_cast<Conv2d*>(l.get())) {
            const std::string n = prefix + "conv" + std::to_string(++conv_i);
            if (params) {
                params->push_back({n + ".w", &c2->w, &c2->gw, &c2->frozen});
                params->push_back({n + ".b", &c2->b, &c2->gb, &c2->frozen});
            }
            if (state) {
                state->push_back({n + ".w", &c2->w});
                state->push_back({n + ".b", &c2->b});
            }
        } else if (auto* c1 = dynamic_cast<Conv1d*>(l.get())) {
            const std::string n = prefix + "conv" + std::to_string(++conv_i);
            if (params) {
                params->push_back({n + ".w", &c1->w, &c1->gw, &c1->frozen});
                params->push_back({n + ".b", &c1->b, &c1->gb, &c1->frozen});
            }
            if (state) {
                state->push_back({n + ".w", &c1->w});
                state->push_back({n + ".b", &c1->b});
            }
        } else if (auto* bn = dynamic_cast<BatchNorm*>(l.get())) {
            const std::string n = prefix + "bn" + std::to_string(++bn_i);
            if (params) {
                params->push_back({n + ".gamma", &bn->gamma, &bn->ggamma, &bn->frozen});
                params->push_back({n + ".beta", &bn->beta, &bn->gbeta, &bn->frozen});
            }
            if (state) {
                state->push_back({n + ".gamma", &bn->gamma});
                state->push_back({n + ".beta", &bn->beta});
                state->push_back({n + ".running_mean", &bn->running_mean});
                state->push_back({n + ".running_var", &bn->running_var});
            }
        }
    }
}

}  // namespace

std::vector<ParamRef> VisualNet::params() {
    std::vector<ParamRef> out;
    collect_named(layers_, "", &out, nullptr);
    return out;
}

std::vector<StateRef> VisualNet::state() {
    std::vector<StateRef> out;
    collect_named(layers_, "", nullptr, &out);
    return out;
}

const Tensor& VisualNet::conv1_weights() const { return convs_.at(0)->w; }

Tensor VisualNet::conv1_response(const Tensor& x) const {
    const Conv2d* c = convs_.at(0);
    Conv2d probe(c->in_ch, c->out_ch, c->k, c->stride, c->pad);
    probe.w = c->w;
    probe.b = c->b;
    return probe.forward(x, false);
}

// ----------------------------------------------------------- sound config

SoundNetConfig SoundNetConfig::paper(int classes) {
    SoundNetConfig cfg;
    cfg.classes = classes;
    return cfg;
}

SoundNetConfig SoundNetConfig::mini(int classes) {
    SoundNetConfig cfg;
    cfg.classes = classes;
    cfg.early_ch = 12;
    cfg.late_ch = 24;
    cfg.dropout = 0.25;
    cfg.relu = true;
    return cfg;
}

std::string SoundNetConfig::hash() const {
    std::ostringstream os;
    os << "sound:" << mel_bands << ':' << classes << ':' << early_ch << ':' << late_ch << ':' << pool << ':'
       << dropout << ':' << relu;
    return fnv_hash(os.str());
}

// -------------------------------------------------------------- sound net

SoundNet::SoundNet(SoundNetConfig cfg, std::uint64_t seed) : cfg_(cfg) {
    std::mt19937_64 rng(seed);
    for (int s = 0; s < 3; ++s) {
        auto& tw = towers_[s].layers;
        for (int stage = 0; stage < 2; ++stage) {
            const int in_ch = stage == 0 ? cfg_.mel_bands : cfg_.early_ch;
            auto conv = std::make_unique<Conv1d>(in_ch, cfg_.early_ch, 5, 1, 2);
            init_conv(conv->w, rng);
            tw.push_back(std::move(conv));
            tw.push_back(std::make_unique<BatchNorm>(cfg_.early_ch));
            if (cfg_.relu) tw.push_back(std::make_unique<ReLU>());
            tw.push_back(std::make_unique<MaxPool>(cfg_.pool));
        }
        tower_out_ch_.push_back(static_cast<std::size_t>(cfg_.early_ch));
    }
    const int concat_ch = 3 * cfg_.early_ch;
    const int late_ch[3] = {cfg_.late_ch, cfg_.late_ch, cfg_.classes};
    int in_ch = concat_ch;
    for (int i = 0; i < 3; ++i) {
        auto conv = std::make_unique<Conv1d>(in_ch, late_ch[i], 1, 1, 0);
        init_conv(conv->w, rng);
        late_.push_back(std::move(conv));
        if (i < 2) {
            late_.push_back(std::make_unique<BatchNorm>(late_ch[i]));
            if (cfg_.relu) late_.push_back(std::make_unique<ReLU>());
            late_.push_back(std::make_unique<Dropout>(cfg_.dropout, seed ^ (0xd0u + i)));
        } else {
            late_.push_back(std::make_unique<Sigmoid>());
        }
        in_ch = late_ch[i];
    }
}

Tensor SoundNet::forward(const std::array<Tensor, 3>& scales, bool train) {
    std::array<Tensor, 3> tower_out;
    for (int s = 0; s < 3; ++s) {
        Tensor y = scales[s];
        for (auto& l : towers_[s].layers) y = l->forward(y, train);
        tower_out[s] = std::move(y);
    }
    const std::size_t N = tower_out[0].dim(0), T = tower_out[0].dim(2);
    for (int s = 1; s < 3; ++s)
        if (tower_out[s].dim(0) != N || tower_out[s].dim(2) != T)
            throw ShapeMismatch("sound tower outputs disagree; the three scales must share T");
    const std::size_t C = tower_out[0].dim(1) + tower_out[1].dim(1) + tower_out[2].dim(1);
    Tensor cat({N, C, T});
    for (std::size_t n = 0; n < N; ++n) {
        std::size_t c0 = 0;
        for (int s = 0; s < 3; ++s) {
            const std::size_t Cs = tower_out[s].dim(1);
            for (std::size_t c = 0; c < Cs; ++c)
                for (std::size_t t = 0; t < T; ++t) cat.at(n, c0 + c, t) = tower_out[s].at(n, c, t);
            c0 += Cs;
        }
    }
    Tensor y = std::move(cat);
    for (auto& l : late_) y = l->forward(y, train);
    return y;
}

void SoundNet::backward(const Tensor& gy) {
    Tensor g = gy;
    for (auto it = late_.rbegin(); it != late_.rend(); ++it) g = (*it)->backward(g);
    // split the concat gradient back into the towers
    const std::size_t N = g.dim(0), T = g.dim(2);
    std::size_t c0 = 0;
    for (int s = 0; s < 3; ++s) {
        const std::size_t Cs = static_cast<std::size_t>(cfg_.early_ch);
        Tensor gs({N, Cs, T});
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t c = 0; c < Cs; ++c)
                for (std::size_t t = 0; t < T; ++t) gs.at(n, c, t) = g.at(n, c0 + c, t);
        c0 += Cs;
        Tensor gt = std::move(gs);
        for (auto it = towers_[s].layers.rbegin(); it != towers_[s].layers.rend(); ++it)
            gt = (*it)->backward(gt);
    }
}

void SoundNet::zero_grad() {
    for (auto& tw : towers_)
        for (auto& l : tw.layers) l->zero_grad();
    for (auto& l : late_) l->zero_grad();
}

std::vector<ParamRef> SoundNet::params() {
    std::vector<ParamRef> out;
    for (int s = 0; s < 3; ++s) collect_named(towers_[s].layers, "s" + std::to_string(s) + ".", &out, nullptr);
    collect_named(late_, "late.", &out, nullptr);
    return out;
}

std::vector<StateRef> SoundNet::state() {
    std::vector<StateRef> out;
    for (int s = 0; s < 3; ++s) collect_named(towers_[s].layers, "s" + std::to_string(s) + ".", nullptr, &out);
    collect_named(late_, "late.", nullptr, &out);
    return out;
}

// -------------------------------------------------------------- pooling

Tensor temporal_average(const Tensor& frame_out) {
    if (frame_out.rank() != 3) throw ShapeMismatch("temporal_average expects [N,G,T]");
    const std::size_t N = frame_out.dim(0), G = frame_out.dim(1), T = frame_out.dim(2);
    Tensor y({N, G});
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t g = 0; g < G; ++g) {
            double acc = 0.0;
            for (std::size_t t = 0; t < T; ++t) acc += frame_out.at(n, g, t);
            y.at(n, g) = acc / static_cast<double>(T);
        }
    return y;
}

Tensor temporal_average_backward(const Tensor& gclip, std::size_t T) {
    const std::size_t N = gclip.dim(0), G = gclip.dim(1);
    Tensor g({N, G, T});
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t gg = 0; gg < G; ++gg)
            for (std::size_t t = 0; t < T; ++t) g.at(n, gg, t) = gclip.at(n, gg) / static_cast<double>(T);
    return g;
}

}  // namespace avact
