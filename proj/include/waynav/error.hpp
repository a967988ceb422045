#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace waynav {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
          message_(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

    /// Same error with `prefix` (usually a file name) prepended.
    ParseError prefixed(const std::string& prefix) const {
        return ParseError(prefix + ": " + message_, line_);
    }

private:
    std::string message_;
    std::size_t line_;
};

/// Query outside the terrain extent.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Graph generation seed does not lie on walkable terrain.
class SeedError : public Error {
public:
    using Error::Error;
};

/// Graph file could not be loaded (version, schema or consistency).
class LoadError : public Error {
public:
    using Error::Error;
};

/// No path exists between two waypoints.
class NoPathError : public Error {
public:
    using Error::Error;
};

/// A masked action was applied.
class IllegalMoveError : public Error {
public:
    using Error::Error;
};

/// A quantity is mathematically undefined for the given input
/// (e.g. relative difference of a zero-length trajectory).
class UndefinedError : public Error {
public:
    using Error::Error;
};

/// A policy returned a malformed action set.
class PolicyFault : public Error {
public:
    PolicyFault(const std::string& policy, const std::string& what)
        : Error("policy '" + policy + "': " + what), policy_(policy) {}
    const std::string& policy() const noexcept { return policy_; }

private:
    std::string policy_;
};

}  // namespace waynav
