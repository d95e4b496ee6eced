#pragma once

#include <string>

#include "avact/activation.hpp"

namespace avact {

// Post-training pointwise fusion of the action stream with the object
// and/or sound streams.
enum class FusionMode { A, AO, AS, AOS };

FusionMode parse_fusion_mode(const std::string& name);
std::string fusion_mode_name(FusionMode mode);

// A -> A; AO -> A.O; AS -> A.S (S broadcast over (i,j)); AOS -> A.O.S.
// Shapes and fps must agree. Throws MissingAuxiliary when a required
// stream is absent.
ActivationMap fuse(FusionMode mode, const ActivationMap& action, const ActivationMap* object,
                   const SoundActivation* sound);

}  // namespace avact
