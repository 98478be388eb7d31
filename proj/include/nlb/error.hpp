#pragma once

#include <stdexcept>
#include <string>

namespace nlb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// GridOffset requested for a shift that is not a whole number of cells.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// A field carried NaN or Inf into an operation that requires finite data.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Time step refused by the CFL check.
class CflError : public Error {
 public:
  CflError(const std::string& what, double cfl_number)
      : Error(what), cfl_number_(cfl_number) {}
  double cfl_number() const noexcept { return cfl_number_; }

 private:
  double cfl_number_;
};

/// Closed-form curve evaluated at or past its singular time.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Input file that does not match its documented format.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlb
