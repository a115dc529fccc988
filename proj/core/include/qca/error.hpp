#pragma once

#include <stdexcept>
#include <string>

namespace qca {

enum class ErrorCode {
    io,
    format,
    bounds,
    empty_input,
    not_a_path,
    too_short,
    invalid_center,
    out_of_range,
    shape_mismatch,
    too_small,
    geometry,
    no_frames,
    empty_profile,
    missing_input,
    config,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /// Message without the category prefix.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }
    /// Same category, message prefixed with "<context>: ".
    [[nodiscard]] Error with_context(const std::string& context) const;

private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace qca
