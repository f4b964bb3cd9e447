#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace insider {

/// Argument outside the mathematical domain of an operation (t >= T, eps <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed configuration, literal or input file.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure of a numerical procedure (quadrature, Monte Carlo path).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double partial_value)
      : NumericalError(what), partial_value_(partial_value) {}

  /// Best estimate accumulated before refinement gave up.
  double partial_value() const noexcept { return partial_value_; }

 private:
  double partial_value_;
};

/// A single Monte Carlo path failed; the batch is aborted.
class PathError : public NumericalError {
 public:
  PathError(const std::string& what, std::uint64_t seed, std::size_t path_index)
      : NumericalError(what), seed_(seed), path_index_(path_index) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t path_index() const noexcept { return path_index_; }

 private:
  std::uint64_t seed_;
  std::size_t path_index_;
};

}  // namespace insider
