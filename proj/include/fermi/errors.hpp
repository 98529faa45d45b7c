#pragma once

#include <stdexcept>
#include <string>

namespace fermi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NotConvex : public Error {
 public:
  using Error::Error;
};

class AmbiguousProjection : public Error {
 public:
  using Error::Error;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

class IndeterminateCertificate : public Error {
 public:
  IndeterminateCertificate(const std::string& what, double theta) : Error(what), theta_(theta) {}
  double theta() const { return theta_; }

 private:
  double theta_;
};

class TooCoarse : public Error {
 public:
  using Error::Error;
};

class TooFine : public Error {
 public:
  using Error::Error;
};

class CurveMismatch : public Error {
 public:
  using Error::Error;
};

class MalformedQuery : public Error {
 public:
  using Error::Error;
};

class MaskRequired : public Error {
 public:
  using Error::Error;
};

class MaskViolation : public Error {
 public:
  using Error::Error;
};

// Raised when a bound that only holds for asymmetric curves is checked on a
// symmetric one. The measured ratio is kept so callers can still report it.
class SymmetryError : public Error {
 public:
  SymmetryError(const std::string& what, double ratio) : Error(what), ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace fermi
