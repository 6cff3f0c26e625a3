#pragma once

#include <stdexcept>
#include <string>

namespace locdb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration file or parameter invariant violation.
class ConfigError : public Error {
public:
    using Error::Error;
};

class DuplicateKeyError : public Error {
public:
    using Error::Error;
};

class KeyNotFoundError : public Error {
public:
    using Error::Error;
};

class KeyRangeError : public Error {
public:
    using Error::Error;
};

/// Raised when lambda * E[S] >= 1 and the queue has no steady state.
class SaturationError : public Error {
public:
    SaturationError(const std::string& what, double utilization)
        : Error(what), utilization_(utilization) {}

    double utilization() const noexcept { return utilization_; }

private:
    double utilization_;
};

class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

class NoFeasibleChoiceError : public Error {
public:
    using Error::Error;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

class UnknownPtnError : public Error {
public:
    using Error::Error;
};

/// Violation of the overlap-coverage protocol preconditions.
class ProtocolError : public Error {
public:
    using Error::Error;
};

class NoCapacityError : public Error {
public:
    using Error::Error;
};

}  // namespace locdb
