#pragma once

#include <stdexcept>
#include <string>

namespace avact {

// Base for all domain errors. The CLI maps these to exit code 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define AVACT_ERROR(Name)                                                  \
    struct Name : Error {                                                  \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

AVACT_ERROR(ClipTooShort);
AVACT_ERROR(EpochExhausted);
AVACT_ERROR(SchemaError);
AVACT_ERROR(FormatError);
AVACT_ERROR(EmptyImage);
AVACT_ERROR(AudioTooShort);
AVACT_ERROR(InsufficientFrames);
AVACT_ERROR(ShapeMismatch);
AVACT_ERROR(ChannelMismatch);
AVACT_ERROR(WeightShapeMismatch);
AVACT_ERROR(ThresholdOutOfRange);
AVACT_ERROR(MissingAuxiliary);
AVACT_ERROR(EmptyMap);
AVACT_ERROR(DivergenceDetected);
AVACT_ERROR(NoCheckpoints);
AVACT_ERROR(NoValidClips);
AVACT_ERROR(EmptyKeypoints);
AVACT_ERROR(NoBoxes);
AVACT_ERROR(NoPositiveFrames);
AVACT_ERROR(SpecError);
AVACT_ERROR(ConfigError);

#undef AVACT_ERROR

}  // namespace avact
