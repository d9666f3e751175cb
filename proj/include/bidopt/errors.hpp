#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bidopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (negative bid,
/// empty curve list, inadmissible allocation entry, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A requested volume exceeds what a supply curve can ever deliver.
class UnsatisfiableSupply : public Error {
 public:
  UnsatisfiableSupply(double target, double max_volume);
  double target() const { return target_; }
  double max_volume() const { return max_volume_; }

 private:
  double target_;
  double max_volume_;
};

/// The impression targets of a set of campaigns cannot be met.
class InfeasibleInstance : public Error {
 public:
  InfeasibleInstance(const std::string& what, std::vector<std::string> campaigns);
  const std::vector<std::string>& campaigns() const { return campaigns_; }

 private:
  std::vector<std::string> campaigns_;
};

/// Brute-force enumeration was refused because it would exceed its cap.
class OracleCapExceeded : public Error {
 public:
  OracleCapExceeded(double states, double cap);
  double states() const { return states_; }
  double cap() const { return cap_; }

 private:
  double states_;
  double cap_;
};

/// The auction simulator cannot replay this curve (non-step segments or a
/// non-integral request volume).
class UnsupportedCurve : public Error {
 public:
  using Error::Error;
};

/// Malformed or unexpected input document.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace bidopt
