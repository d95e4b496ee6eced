#include "avact/fusion.hpp"

#include <cmath>

#include "avact/kernels.hpp"

namespace avact {

FusionMode parse_fusion_mode(const std::string& name) {
    if (name == "A") return FusionMode::A;
    if (name == "AO") return FusionMode::AO;
    if (name == "AS") return FusionMode::AS;
    if (name == "AOS") return FusionMode::AOS;
    throw ConfigError("unknown fusion mode '" + name + "'");
}

std::string fusion_mode_name(FusionMode mode) {
    switch (mode) {
        case FusionMode::A: return "A";
        case FusionMode::AO: return "AO";
        case FusionMode::AS: return "AS";
        case FusionMode::AOS: return "AOS";
    }
    return "?";
}

ActivationMap fuse(FusionMode mode, const ActivationMap& action, const ActivationMap* object,
                   const SoundActivation* sound) {
    const bool need_obj = mode == FusionMode::AO || mode == FusionMode::AOS;
    const bool need_snd = mode == FusionMode::AS || mode == FusionMode::AOS;
    if (need_obj && !object) throw MissingAuxiliary(fusion_mode_name(mode) + " needs an object map");
    if (need_snd && !sound) throw MissingAuxiliary(fusion_mode_name(mode) + " needs a sound activation");

    ActivationMap out = action;
    out.modality = mode == FusionMode::A ? action.modality : Modality::fused;
    if (need_obj) {
        if (!object->data.same_shape(action.data)) throw ShapeMismatch("object map shape vs action map");
        if (std::abs(object->fps - action.fps) > 1e-9) throw ShapeMismatch("object map fps vs action map");
        kern::mul(out.data.data(), object->data.data(), out.data.data(), out.data.size());
    }
    if (need_snd) {
        if (sound->classes() != action.classes() || sound->times() != action.times())
            throw ShapeMismatch("sound activation shape vs action map");
        if (std::abs(sound->fps - action.fps) > 1e-9) throw ShapeMismatch("sound activation fps vs action map");
        const std::size_t G = out.classes(), T = out.times(), S = out.rows() * out.cols();
        for (std::size_t g = 0; g < G; ++g)
            for (std::size_t t = 0; t < T; ++t)
                kern::scale(sound->data.at(g, t), &out.data[(g * T + t) * S], S);
    }
    return out;
}

}  // namespace avact
