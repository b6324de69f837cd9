#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sptk {

/// Error thrown by library operations. `code` is a stable machine-readable
/// identifier of the form "<module>.<condition>", used by the CLI to emit
/// structured error objects and pick exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, int exit_code = 1)
        : std::runtime_error(message), code_(std::move(code)), exit_code_(exit_code) {}

    const std::string& code() const noexcept { return code_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string code_;
    int exit_code_;
};

inline Error usage_error(const std::string& message) {
    return Error("cli.usage", message, 2);
}

} // namespace sptk
