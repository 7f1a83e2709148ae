#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace heatcast {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Index = Eigen::Index;

/// Hour-aligned UTC instant.
using Timestamp = std::chrono::sys_time<std::chrono::hours>;
using Date = std::chrono::sys_days;

/// Base for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV rows, config lines). Carries the 1-based row when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0)
        : Error(row ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Data violates a precondition: misaligned series, too few samples, shape mismatch.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Unreadable, truncated or incompatible checkpoint.
class CheckpointError : public Error {
public:
    enum class Kind { Corrupt, Version, Shape };
    CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace heatcast
