#pragma once

#include <stdexcept>
#include <string>

namespace temo {

// Error classes map to CLI exit codes (see tools/temo_main.cpp).
enum class ErrorKind {
    Internal,   // exit 1
    Config,     // exit 2
    Io,         // exit 3
    Parse,      // exit 4 (mesh/prompt/file parse failures)
    Numeric,    // exit 5 (NaN loss, degenerate inputs)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

}  // namespace temo
