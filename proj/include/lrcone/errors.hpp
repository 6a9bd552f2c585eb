#pragma once

#include <stdexcept>
#include <string>

namespace lrcone {

// Exit-code contract: 0 success, 1 domain error, 2 config error, 3 verification failure.

// Mathematical precondition violated (parameter outside an op's domain).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: bad config keys, unparsable grids, missing files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A verification check failed. The report is still written before this is raised.
class VerificationFailure : public std::runtime_error {
public:
    explicit VerificationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lrcone
