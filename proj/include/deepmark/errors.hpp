#pragma once

#include <stdexcept>
#include <string>

namespace deepmark {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// audio I/O and transforms
struct UnsupportedFormat : Error { using Error::Error; };
struct CorruptHeader : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct InconsistentShape : Error { using Error::Error; };

// condition chain
struct SkippedCondition : Error { using Error::Error; };
struct SilentCarrier : Error { using Error::Error; };
struct SilentImpulse : Error { using Error::Error; };
struct TooShort : Error { using Error::Error; };
struct RangeViolation : Error { using Error::Error; };
struct ToolFailure : Error { using Error::Error; };
struct MalformedToolOutput : Error { using Error::Error; };

// watermarking and scoring
struct WatermarkLowEnergy : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct MissingScore : Error { using Error::Error; };
struct AdapterFailure : Error { using Error::Error; };

// metrics and protocol
struct OneClassOnly : Error { using Error::Error; };
struct ParseFailure : Error { using Error::Error; };
struct DuplicateUtterance : Error { using Error::Error; };
struct MissingAudio : Error { using Error::Error; };

// harness
struct ConfigInvalid : Error { using Error::Error; };

} // namespace deepmark
