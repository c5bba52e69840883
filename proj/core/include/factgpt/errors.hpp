#pragma once

#include <stdexcept>
#include <string>

namespace factgpt {

// Stable error classes. The CLI maps each one to a distinct exit code,
// so additions must keep existing values.
enum class ErrorCode {
    config_invalid,
    missing_input,
    empty_input,
    empty_corpus,
    duplicate_id,
    unknown_doc,
    dimension_mismatch,
    zero_vector,
    empty_text,
    provider_unavailable,
    timeout,
    script_miss,
    unparsable_response,
    generation_exhausted,
    no_votes,
    missing_order,
    empty_class,
    key_mismatch,
    empty_matrix,
    io_failure,
    internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace factgpt
