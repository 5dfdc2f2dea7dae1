#pragma once

#include <stdexcept>
#include <string>

namespace delayrc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// The delay system left its equilibrium basin during integration (exit code 3).
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double blowup_time);
    double blowup_time() const noexcept { return blowup_time_; }

private:
    double blowup_time_;
};

// The Pascal's-triangle expansion did not converge (exit code 3).
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Linear solve or statistics failure (exit code 4).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace delayrc
