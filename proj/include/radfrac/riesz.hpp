#pragma once

// Fractional differentiation D^alpha and its right inverse I^alpha acting on
// radial functions, with the Riesz normalization constants.

#include <optional>
#include <string>
#include <vector>

#include "radfrac/radial_function.hpp"

namespace radfrac {

/// Order alpha > 0. alpha within 1e-12 of 1 selects the logarithmic kernel.
class AlphaOrder {
 public:
  explicit AlphaOrder(double alpha);

  double value() const { return alpha_; }
  bool is_log_branch() const { return log_branch_; }

  /// |1 - q^(alpha-1)| < 1e-6 off the log branch: c_alpha is close to its
  /// pole and the power-kernel formulas lose accuracy.
  bool near_pole(const FieldParams& fp) const;

 private:
  double alpha_;
  bool log_branch_;
};

/// Gamma_K(s) = (1 - q^(s-1)) / (1 - q^(-s)). Throws PoleError at s = 0.
double gamma_K(const FieldParams& fp, double s);

struct RieszConstants {
  double d_alpha;                 // (1 - q^a) / (1 - q^(-a-1))
  std::optional<double> c_alpha;  // (1 - q^-a) / (1 - q^(a-1)), empty at a = 1

  /// c_alpha, or LogBranchError at alpha = 1.
  double c() const;
};

RieszConstants constants(const FieldParams& fp, const AlphaOrder& a);

/// Coefficient of u(q^n) q^(-alpha n) in D^alpha u:
/// q^-1 (q^a + q - 2) / (1 - q^(-a-1)).
double diagonal_coefficient(const FieldParams& fp, const AlphaOrder& a);

/// Lower integral over the ball |y| < |x| = q^n,
///
///   J(n) = int (|x|^(a-1) - |y|^(a-1)) v(|y|) dy     alpha != 1
///   J(n) = int (log|x| - log|y|) v(|y|) dy           alpha == 1
///
/// evaluated level by level from the bottom of a window upward. Levels below
/// the window hold `head` (the value at zero) and contribute closed-form
/// geometric sums. The kernel separates, so two running sums per level
/// suffice. Value is a complex scalar or an Eigen vector.
template <typename Value>
class LowerIntegral {
 public:
  LowerIntegral(const FieldParams& fp, const AlphaOrder& a, int n_min,
                const Value& head)
      : fp_(fp), a_(a), n_(n_min) {
    const double q = fp.qd();
    const double alpha = a.value();
    s1_ = (fp.pow(n_min) / (q - 1.0)) * head;
    if (a.is_log_branch()) {
      // sum_{k<n_min} (n_min - k) q^k = q^(n_min) q / (q-1)^2
      s2_ = (fp.pow(n_min) * q / ((q - 1.0) * (q - 1.0))) * head;
    } else {
      s2_ = (fp.pow(alpha * n_min) / (fp.pow(alpha) - 1.0)) * head;
    }
  }

  int level() const { return n_; }

  /// J at the current level; depends only on levels strictly below it.
  Value value() const {
    const double shell = 1.0 - 1.0 / fp_.qd();
    if (a_.is_log_branch()) {
      return (shell * fp_.log_q()) * s2_;
    }
    const double alpha = a_.value();
    return shell * (fp_.pow((alpha - 1.0) * n_) * s1_ - s2_);
  }

  /// Consume v(q^n) at the current level and move one level up.
  void push(const Value& v_n) {
    const double weight = fp_.pow(n_);
    s1_ = s1_ + weight * v_n;
    if (a_.is_log_branch()) {
      // A(n+1) = A(n) + sum_{k<=n} q^k v_k
      s2_ = s2_ + s1_;
    } else {
      s2_ = s2_ + fp_.pow(a_.value() * n_) * v_n;
    }
    ++n_;
  }

  /// sum_{k < level} q^k v_k
  const Value& first_moment() const { return s1_; }

 private:
  FieldParams fp_;
  AlphaOrder a_;
  int n_;
  Value s1_;  // sum_{k<n} q^k v_k
  Value s2_;  // sum_{k<n} q^(a k) v_k, or sum_{k<n} (n-k) q^k v_k on the log branch
};

/// Multiplier of J(n) in I^alpha: c_alpha, or (1 - q)/(q log q) at alpha = 1.
double lower_integral_factor(const FieldParams& fp, const AlphaOrder& a);

/// Multiplier of q^(alpha n) v(q^n) in I^alpha: q^-alpha.
inline double diagonal_factor(const FieldParams& fp, const AlphaOrder& a) {
  return fp.pow(-a.value());
}

/// D^alpha u on u's grid. Head and tail sums are closed-form; the output
/// tail is the exact continuation of D^alpha u above the grid. The output
/// value_at_zero is the value at the lowest grid level (see zero_limit).
/// Throws DivergentTailError when a power tail grows like |x|^alpha or
/// faster.
RadialFunction apply_D(const RadialFunction& u, const AlphaOrder& a);

/// I^alpha u on u's grid, with (I^alpha u)(0) = 0. The input tail may carry
/// an offset and power terms but no log slope; the output tail is the exact
/// continuation above the grid.
RadialFunction apply_I(const RadialFunction& u, const AlphaOrder& a);

/// Value of D^alpha u at the lowest grid level together with how much it
/// still moves between the two lowest levels. The limit at zero is never
/// asserted.
struct ZeroLimit {
  cd value;
  double drift;
};
ZeroLimit zero_limit(const RadialFunction& du);

/// (D^-alpha u)(0), the constant separating D^-alpha from I^alpha. Requires
/// the integral over the whole field to converge.
cd riesz_potential_at_zero(const RadialFunction& u, const AlphaOrder& a);

/// d_{alpha,m} q^(alpha n (m+1)): the integral over |y| < q^n of
/// | |x|^(a-1) - |y|^(a-1) | |y|^(a m) (or the log-kernel analogue).
double moment_integral_closed(const FieldParams& fp, const AlphaOrder& a, int m,
                              int n);

/// d_{alpha,m} alone.
double moment_coefficient(const FieldParams& fp, const AlphaOrder& a, int m);

struct InverseIdentityReport {
  std::vector<double> deviation;  // |D I v - v| per grid level
  double max_deviation = 0.0;     // over all grid levels
  double max_interior_deviation = 0.0;
  int margin = 0;
  bool precondition_ok = true;
  std::string note;
};

/// Checks D^alpha I^alpha v = v on v's grid. `margin` levels at each edge
/// are excluded from max_interior_deviation.
InverseIdentityReport verify_inverse_identity(const RadialFunction& v,
                                              const AlphaOrder& a,
                                              int margin = 0);

}  // namespace radfrac
