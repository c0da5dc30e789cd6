#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad dimensions, invalid structure, bad config).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A linear system or factorization that cannot be solved.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// An iterative solver or trainer that did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Warnings go to stderr; tests switch them off.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);

/// Deterministic child seed from a master seed and a text tag (splitmix64 over FNV-1a).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

/// 64-bit FNV-1a digest, used for config hashes in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

/// Shortest round-trippable decimal form of a double ("%.17g" trimmed).
std::string format_double(double value);
/// Fixed-precision form used in human-facing tables and long-format CSVs.
std::string format_fixed(double value, int decimals);

}  // namespace hfc
