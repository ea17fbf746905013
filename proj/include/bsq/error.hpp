#pragma once

#include <stdexcept>
#include <string>

namespace bsq {

// Stable status map shared with the C API and the CLI exit codes.
enum class Status : int {
  ok = 0,
  verification_failed = 1,
  config = 2,
  orbit = 3,
  eigensolver = 4,
  parse = 5,
  domain = 6,
  invalid_argument = 7,
  window = 8,
  non_monotone = 9,
  internal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(Status::parse, what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Status::domain, what) {}
};

class OrbitError : public Error {
 public:
  enum class Kind { no_return, projection_failed, critical_point, winding, level_drift, closure };

  OrbitError(Kind kind, double energy, const std::string& what)
      : Error(Status::orbit, what + " (E = " + std::to_string(energy) + ")"), kind_(kind), energy_(energy) {}
  Kind kind() const noexcept { return kind_; }
  double energy() const noexcept { return energy_; }

 private:
  Kind kind_;
  double energy_;
};

class WindowError : public Error {
 public:
  explicit WindowError(const std::string& what) : Error(Status::window, what) {}
};

class NonMonotoneError : public Error {
 public:
  NonMonotoneError(const std::string& what, double lo, double hi)
      : Error(Status::non_monotone, what + " on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
        lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_, hi_;
};

class EigenError : public Error {
 public:
  EigenError(const std::string& what, int iterations)
      : Error(Status::eigensolver, what + " after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

}  // namespace bsq
