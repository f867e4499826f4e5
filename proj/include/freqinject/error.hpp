#pragma once

#include <stdexcept>
#include <string>

namespace freqinject {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data could not be used (bad file, bad record, unusable corpus).
class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class FormatError : public DataError {
public:
    using DataError::DataError;
};

class DimensionMismatch : public DataError {
public:
    using DataError::DataError;
};

class InvalidArgument : public DataError {
public:
    using DataError::DataError;
};

/// A ratio metric whose denominator is zero.
class UndefinedMetric : public DataError {
public:
    using DataError::DataError;
};

/// Training or ROC input that contains only one label.
class SingleClassError : public DataError {
public:
    using DataError::DataError;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double learning_rate)
        : Error(what), learning_rate_(learning_rate) {}

    double learning_rate() const noexcept { return learning_rate_; }

private:
    double learning_rate_;
};

}  // namespace freqinject
