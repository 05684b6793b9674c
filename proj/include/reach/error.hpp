#pragma once

#include <stdexcept>
#include <string>

namespace reach {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input vector or command does not have the expected dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Arguments violate an operation's preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A recall found no association for the best matching unit.
class NoAssociationError : public Error {
public:
    NoAssociationError(int neuron)
        : Error("neuron " + std::to_string(neuron) + " has no association"), neuron_(neuron) {}

    int neuron() const { return neuron_; }

private:
    int neuron_;
};

/// A file could not be read or does not match the expected format.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace reach
