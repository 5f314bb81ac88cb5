#pragma once

#include <stdexcept>
#include <string>

namespace epl {

// Coarse failure categories. They map 1:1 onto the C API status codes and
// the CLI exit codes (usage=2, io=3, internal=4).
enum class ErrorKind {
    invalid_argument,   // bad parameter, malformed config, unknown method id
    dimension_mismatch, // incompatible vector/matrix shapes
    domain,             // value outside the mathematical domain (negative histogram, NaN)
    insufficient_data,  // not enough samples for the requested operation
    degenerate_split,   // split would leave a role empty
    degenerate_labels,  // single-class or missing-class label vector
    numerical,          // singular system, failed solve
    io,                 // file read/write failure
    invariant,          // internal contract violated (always a bug or misuse)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace epl
