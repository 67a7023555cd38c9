#pragma once

#include <stdexcept>
#include <string>

namespace ncb {

// Base for every error the toolkit raises deliberately.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector or matrix sizes that do not chain.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Bad experiment configuration or an invalid argument value.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A simulation or training loop produced a non-finite or runaway value.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long tick)
        : Error(what + " (tick " + std::to_string(tick) + ")"), tick_(tick) {}

    long tick() const noexcept { return tick_; }

private:
    long tick_;
};

// An emulator was asked to serve before passing its validation gate.
class NotReadyError : public Error {
public:
    using Error::Error;
};

}  // namespace ncb
