#include "avact/activation.hpp"

namespace avact {

std::string modality_name(Modality m) {
    switch (m) {
        case Modality::object: return "object";
        case Modality::action: return "action";
        case Modality::fused: return "fused";
        case Modality::sound: return "sound";
    }
    return "unknown";
}

void ActivationMap::validate() const {
    if (data.rank() != 4) throw ShapeMismatch("activation map must be rank 4");
    if (fps <= 0) throw ShapeMismatch("activation map fps must be positive");
    if (stride < 1) throw ShapeMismatch("activation map stride must be >= 1");
    if (data.min() < 0.0 || data.max() > 1.0) throw ShapeMismatch("activation values must lie in [0,1]");
}

void SoundActivation::validate() const {
    if (data.rank() != 2) throw ShapeMismatch("sound activation must be rank 2");
    if (fps <= 0) throw ShapeMismatch("sound activation fps must be positive");
    if (data.min() < 0.0 || data.max() > 1.0) throw ShapeMismatch("activation values must lie in [0,1]");
}

}  // namespace avact
