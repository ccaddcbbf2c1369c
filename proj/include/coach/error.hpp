#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coach {

/// Closed set of failure classes surfaced to callers and mapped to HTTP status by the api layer.
enum class ErrorCode {
    validation,
    not_found,
    state,
    busy,
    upstream,
    storage,
    script,      // scripted gateway misconfiguration (exhausted / unknown template)
    extraction,  // no JSON block found in model text
    parse,       // JSON block found but not parsable
};

std::string_view to_string(ErrorCode code) noexcept;

class CoachError : public std::runtime_error {
public:
    CoachError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Upstream failure from the model endpoint; carries the last HTTP status (0 for transport errors).
class UpstreamError : public CoachError {
public:
    UpstreamError(int status, const std::string& message)
        : CoachError(ErrorCode::upstream, message), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Thrown when a balanced JSON block exists but cannot be parsed even after repair.
class JsonParseError : public CoachError {
public:
    JsonParseError(std::string block, const std::string& message)
        : CoachError(ErrorCode::parse, message), block_(std::move(block)) {}

    const std::string& block() const noexcept { return block_; }

private:
    std::string block_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw CoachError(code, message);
}

}  // namespace coach
