#pragma once

#include <stdexcept>
#include <string>

namespace proxctl {

//! Raised when input data fail structural validation: mismatched shapes,
//! non-finite values, unknown levels, malformed files.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

//! Raised when a numerical procedure cannot produce a trustworthy result.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

//! A Gram or system matrix is rank deficient where an exact solve is needed.
class SingularityError : public NumericError {
 public:
  SingularityError(const std::string& msg, int rank, int dimension)
      : NumericError(msg), rank(rank), dimension(dimension) {}
  int rank;
  int dimension;
};

//! The moment system admits no solution within tolerance.
class IdentificationError : public NumericError {
 public:
  explicit IdentificationError(const std::string& msg) : NumericError(msg) {}
};

//! A conditional density ratio is undefined on part of the support.
class AbsoluteContinuityError : public NumericError {
 public:
  explicit AbsoluteContinuityError(const std::string& msg) : NumericError(msg) {}
};

//! The target function has mass outside the range of the conditional operator.
class OperatorRangeError : public NumericError {
 public:
  explicit OperatorRangeError(const std::string& msg) : NumericError(msg) {}
};

//! Too many resampled refits failed to produce usable draws.
class BootstrapError : public NumericError {
 public:
  explicit BootstrapError(const std::string& msg) : NumericError(msg) {}
};

//! An evaluation point falls outside the support recorded at fit time.
class SupportError : public DataError {
 public:
  explicit SupportError(const std::string& msg) : DataError(msg) {}
};

}  // namespace proxctl
