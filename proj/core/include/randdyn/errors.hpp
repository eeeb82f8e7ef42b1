#pragma once

#include <stdexcept>
#include <string>

namespace randdyn {

// Bad or inconsistent user input (configs, map/point syntax, weights).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A configurable budget was exhausted (term caps, node caps, coordinate size).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical precondition failed (zero variance, escape impossible, ...).
// `name()` is the stable identifier surfaced by the CLI.
class MathError : public std::runtime_error {
public:
    MathError(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// A map was evaluated at a point of its indeterminacy locus.
class IndeterminatePointError : public MathError {
public:
    IndeterminatePointError(const std::string& what, long step = -1)
        : MathError("IndeterminatePoint", what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

} // namespace randdyn
