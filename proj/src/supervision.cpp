#include "avact/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace avact {

TargetMode parse_target_mode(const std::string& name) {
    if (name == "VT") return TargetMode::VT;
    if (name == "OT") return TargetMode::OT;
    if (name == "ST") return TargetMode::ST;
    if (name == "SOT") return TargetMode::SOT;
    throw ConfigError("unknown target mode '" + name + "'");
}

std::string target_mode_name(TargetMode mode) {
    switch (mode) {
        case TargetMode::VT: return "VT";
        case TargetMode::OT: return "OT";
        case TargetMode::ST: return "ST";
        case TargetMode::SOT: return "SOT";
    }
    return "?";
}

namespace {

void check_threshold(double t) {
    if (!(t > 0.0 && t < 1.0)) throw ThresholdOutOfRange(std::to_string(t) + " not in (0,1)");
}

// 0.5 -> "05", 0.25 -> "025": the decimal expansion with the dot removed.
std::string threshold_digits(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    std::string s(buf);
    s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
    return s;
}

}  // namespace

void TargetSpec::validate() const {
    const bool need_v = mode == TargetMode::ST || mode == TargetMode::SOT;
    const bool need_u = mode == TargetMode::OT || mode == TargetMode::SOT;
    if (need_v != sound_threshold.has_value())
        throw ConfigError(target_mode_name(mode) + (need_v ? " requires" : " does not take") +
                          " a sound threshold");
    if (need_u != object_threshold.has_value())
        throw ConfigError(target_mode_name(mode) + (need_u ? " requires" : " does not take") +
                          " an object threshold");
    if (sound_threshold) check_threshold(*sound_threshold);
    if (object_threshold) check_threshold(*object_threshold);
}

std::string TargetSpec::canonical_name() const {
    validate();
    std::string name = target_mode_name(mode);
    if (sound_threshold) name += threshold_digits(*sound_threshold);
    if (object_threshold) name += threshold_digits(*object_threshold);
    return name;
}

Tensor binarize(const Tensor& source, double threshold) {
    check_threshold(threshold);
    Tensor out(source.dims());
    for (std::size_t i = 0; i < source.size(); ++i) out[i] = source[i] >= threshold ? 1.0 : 0.0;
    return out;
}

BinaryMask binarize(const ActivationMap& source, double threshold) {
    return BinaryMask{binarize(source.data, threshold), threshold, source.modality};
}

BinaryMask binarize(const SoundActivation& source, double threshold) {
    return BinaryMask{binarize(source.data, threshold), threshold, Modality::sound};
}

Target build_target(const TargetSpec& spec, const ClipTags& tags, const ActivationMap* obj,
                    const SoundActivation* snd) {
    spec.validate();
    const bool need_obj = spec.mode == TargetMode::OT || spec.mode == TargetMode::SOT;
    const bool need_snd = spec.mode == TargetMode::ST || spec.mode == TargetMode::SOT;
    if (need_obj && !obj) throw MissingAuxiliary(spec.canonical_name() + " needs an object map");
    if (need_snd && !snd) throw MissingAuxiliary(spec.canonical_name() + " needs a sound activation");

    const std::size_t G = tags.size();
    if (need_obj && obj->classes() != G) throw ShapeMismatch("object map class count vs tags");
    if (need_snd && snd->classes() != G) throw ShapeMismatch("sound activation class count vs tags");
    if (need_obj && need_snd && obj->times() != snd->times())
        throw ShapeMismatch("object and sound T axes must be aligned");

    switch (spec.mode) {
        case TargetMode::VT: {
            // V_g per (g,t); T is irrelevant to the values, callers
            // broadcast over whatever T the action map has. Emitted as
            // [G,1] and broadcast at loss time.
            Tensor t({G, 1});
            for (std::size_t g = 0; g < G; ++g) t.at(g, 0) = tags.positive(g) ? 1.0 : 0.0;
            return {std::move(t), ComparisonMode::spatial_max};
        }
        case TargetMode::ST: {
            return {binarize(snd->data, *spec.sound_threshold), ComparisonMode::spatial_max};
        }
        case TargetMode::OT: {
            return {binarize(obj->data, *spec.object_threshold), ComparisonMode::spatial_map};
        }
        case TargetMode::SOT: {
            Tensor o = binarize(obj->data, *spec.object_threshold);
            Tensor s = binarize(snd->data, *spec.sound_threshold);
            const std::size_t T = obj->times(), I = obj->rows(), J = obj->cols();
            Tensor t({G, T, I, J});
            for (std::size_t g = 0; g < G; ++g)
                for (std::size_t tt = 0; tt < T; ++tt) {
                    const double gate = s.at(g, tt);
                    if (gate == 0.0) continue;
                    for (std::size_t i = 0; i < I; ++i)
                        for (std::size_t j = 0; j < J; ++j) t.at(g, tt, i, j) = o.at(g, tt, i, j);
                }
            return {std::move(t), ComparisonMode::spatial_map};
        }
    }
    throw ConfigError("unreachable target mode");
}

double bce_loss(const Tensor& p, const Tensor& q) {
    if (!p.same_shape(q)) throw ShapeMismatch("bce_loss operand shapes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pc = std::clamp(p[i], kBceEps, 1.0 - kBceEps);
        acc += -(q[i] * std::log(pc) + (1.0 - q[i]) * std::log(1.0 - pc));
    }
    return acc / static_cast<double>(p.size());
}

Tensor bce_grad(const Tensor& p, const Tensor& q) {
    if (!p.same_shape(q)) throw ShapeMismatch("bce_grad operand shapes differ");
    Tensor g(p.dims());
    const double inv_n = 1.0 / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < kBceEps || p[i] > 1.0 - kBceEps) continue;  // clip active: flat
        g[i] = (-(q[i] / p[i]) + (1.0 - q[i]) / (1.0 - p[i])) * inv_n;
    }
    return g;
}

Tensor spatial_max(const Tensor& map_frame) {
    if (map_frame.rank() != 3) throw ShapeMismatch("spatial_max expects [G,I,J]");
    if (map_frame.size() == 0) throw EmptyMap("empty map frame");
    const std::size_t G = map_frame.dim(0), S = map_frame.dim(1) * map_frame.dim(2);
    Tensor out({G});
    for (std::size_t g = 0; g < G; ++g) {
        const double* p = &map_frame[g * S];
        out[g] = *std::max_element(p, p + S);
    }
    return out;
}

Tensor SpatialMaxPool::forward(const Tensor& maps) {
    if (maps.rank() != 4) throw ShapeMismatch("SpatialMaxPool expects [N,G,I,J]");
    const std::size_t N = maps.dim(0), G = maps.dim(1), S = maps.dim(2) * maps.dim(3);
    in_dims_ = maps.dims();
    Tensor out({N, G});
    argmax_.assign(N * G, 0);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t g = 0; g < G; ++g) {
            const std::size_t base = (n * G + g) * S;
            const double* p = &maps[base];
            // first maximum in row-major order takes the subgradient
            const double* best = std::max_element(p, p + S);
            out.at(n, g) = *best;
            argmax_[n * G + g] = base + static_cast<std::size_t>(best - p);
        }
    return out;
}

Tensor SpatialMaxPool::backward(const Tensor& gy) const {
    Tensor gx(in_dims_);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[argmax_[i]] += gy[i];
    return gx;
}

}  // namespace avact
