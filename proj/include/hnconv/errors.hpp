#pragma once

#include <stdexcept>
#include <string>

namespace hnconv {

/// Direct sparse factorization failed or produced an unusable solution.
class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Config file could not be parsed; carries the offending line number (1-based,
/// 0 when the whole file is at fault).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                      : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

} // namespace hnconv
