#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace radfrac {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad parameters, inconsistent lengths, non-finite values,
/// malformed documents.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Gamma_K evaluated at its pole s = 0.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A power-kernel quantity was requested at alpha = 1, where the kernel is
/// logarithmic.
class LogBranchError : public Error {
 public:
  using Error::Error;
};

/// An integral over the whole field diverges because of the tail model.
class DivergentTailError : public Error {
 public:
  using Error::Error;
};

/// The operator cannot continue a tail model of this kind in closed form.
class UnsupportedTailError : public Error {
 public:
  using Error::Error;
};

/// A level pivot 1 + q^(-alpha) a(q^n) q^(alpha n) is (numerically) zero.
class SingularPivotError : public Error {
 public:
  SingularPivotError(int level, double magnitude)
      : Error("singular pivot at level " + std::to_string(level) + " (|pivot| = " +
              short_real(magnitude) + ")"),
        level_(level),
        magnitude_(magnitude) {}

  int level() const { return level_; }
  double magnitude() const { return magnitude_; }

 private:
  static std::string short_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
  }

  int level_;
  double magnitude_;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace radfrac
