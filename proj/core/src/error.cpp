#include "qca/error.hpp"

namespace qca {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    case ErrorCode::bounds: return "bounds";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::not_a_path: return "not-a-path";
    case ErrorCode::too_short: return "too-short";
    case ErrorCode::invalid_center: return "invalid-center";
    case ErrorCode::out_of_range: return "range";
    case ErrorCode::shape_mismatch: return "shape";
    case ErrorCode::too_small: return "size";
    case ErrorCode::geometry: return "geometry";
    case ErrorCode::no_frames: return "no-frames";
    case ErrorCode::empty_profile: return "empty-profile";
    case ErrorCode::missing_input: return "missing-input";
    case ErrorCode::config: return "config";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " error: " + message), code_(code), message_(message)
{
}

Error Error::with_context(const std::string& context) const
{
    return Error(code_, context + ": " + message_);
}

}  // namespace qca
