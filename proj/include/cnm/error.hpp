#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cnm {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class FormatError : public Error {
public:
    using Error::Error;
};
class DataError : public Error {
public:
    using Error::Error;
};
class InsufficientData : public Error {
public:
    using Error::Error;
};
class EmptyInput : public Error {
public:
    using Error::Error;
};
class BoundsError : public Error {
public:
    using Error::Error;
};
class DegenerateInput : public Error {
public:
    using Error::Error;
};
class ConfigError : public Error {
public:
    using Error::Error;
};
class ProjectionError : public Error {
public:
    using Error::Error;
};
class DegenerateNetwork : public Error {
public:
    using Error::Error;
};
class NoFoldError : public Error {
public:
    using Error::Error;
};

// Integration failures carry the step at which the state left the valid domain.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class SingularityError : public DivergenceError {
public:
    using DivergenceError::DivergenceError;
};

}  // namespace cnm
