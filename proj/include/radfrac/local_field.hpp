#pragma once

// Measures and closed-form integrals over balls and spheres of a
// non-Archimedean local field. The field only enters through the residue
// cardinality q: every point on level n has |x| = q^n, and Haar measure is
// normalized so that the unit ball has volume 1.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include "radfrac/errors.hpp"

namespace radfrac {

/// Residue field cardinality. Any integer q >= 2 is accepted; primality is
/// never used by the formulas below.
class FieldParams {
 public:
  explicit FieldParams(int q) : q_(q) {
    if (q < 2) {
      throw ValidationError("q must be >= 2, got " + std::to_string(q));
    }
  }

  int q() const { return q_; }
  double qd() const { return static_cast<double>(q_); }
  double log_q() const { return std::log(qd()); }

  /// q^e for real e.
  double pow(double e) const { return std::pow(qd(), e); }

  friend bool operator==(const FieldParams&, const FieldParams&) = default;

 private:
  int q_;
};

namespace detail {
inline void require_positive_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("alpha must be a finite positive number, got " +
                          std::to_string(alpha));
  }
}
}  // namespace detail

// Volumes. The factored forms are kept exactly as in the defining formulas.

template <typename Real = double>
Real ball_volume(const FieldParams& fp, int n) {
  return std::pow(Real(fp.q()), Real(n));
}

template <typename Real = double>
Real sphere_volume(const FieldParams& fp, int n) {
  const Real q = fp.q();
  return (Real(1) - Real(1) / q) * std::pow(q, Real(n));
}

/// Measure of {|x| = q^n, leading digit x_0 = k_0} for a fixed nonzero k_0.
template <typename Real = double>
Real sector_volume_fixed_digit(const FieldParams& fp, int n) {
  return std::pow(Real(fp.q()), Real(n - 1));
}

/// Measure of {|x| = q^n, leading digit x_0 != k_0}. Vanishes for q = 2.
template <typename Real = double>
Real sector_volume_excluded_digit(const FieldParams& fp, int n) {
  const Real q = fp.q();
  return (Real(1) - Real(2) / q) * std::pow(q, Real(n));
}

/// Integral of |x|^(alpha-1) over the ball |x| <= q^n.
template <typename Real = double>
Real ball_integral_power(const FieldParams& fp, Real alpha, int n) {
  detail::require_positive_alpha(static_cast<double>(alpha));
  const Real q = fp.q();
  return (Real(1) - Real(1) / q) / (Real(1) - std::pow(q, -alpha)) *
         std::pow(q, alpha * Real(n));
}

/// Integral of |x - a|^(alpha-1) over the sphere |x| = q^n, where |a| = q^n.
template <typename Real = double>
Real sphere_integral_shifted_power(const FieldParams& fp, Real alpha, int n) {
  detail::require_positive_alpha(static_cast<double>(alpha));
  const Real q = fp.q();
  return (q - Real(2) + std::pow(q, -alpha)) /
         (q * (Real(1) - std::pow(q, -alpha))) * std::pow(q, alpha * Real(n));
}

/// Integral of log|x| over the ball |x| <= q^n (natural logarithm).
template <typename Real = double>
Real ball_integral_log(const FieldParams& fp, int n) {
  const Real q = fp.q();
  return (Real(n) - Real(1) / (q - Real(1))) * std::pow(q, Real(n)) *
         std::log(q);
}

/// Integral of log|x - a| over the sphere |x| = q^n, where |a| = q^n.
template <typename Real = double>
Real sphere_integral_shifted_log(const FieldParams& fp, int n) {
  const Real q = fp.q();
  const Real log_a = Real(n) * std::log(q);
  return ((Real(1) - Real(1) / q) * log_a - std::log(q) / (q - Real(1))) *
         std::pow(q, Real(n));
}

/// Sum over levels k in [n_low, n_high] of sphere_volume(k) * weights(k).
/// This is the reference quadrature for radial integrals over shells.
template <typename Scalar = std::complex<double>>
Scalar oracle_radial_sum(const FieldParams& fp,
                         const std::function<Scalar(int)>& weights, int n_low,
                         int n_high) {
  if (n_low > n_high) {
    throw ValidationError("oracle_radial_sum: n_low > n_high");
  }
  Scalar acc{};
  // Ascending order: the largest shells of a decaying integrand come last.
  for (int k = n_low; k <= n_high; ++k) {
    acc += sphere_volume<double>(fp, k) * weights(k);
  }
  return acc;
}

/// Radial integral over the ball |x| <= q^n_high with the lower end
/// truncated adaptively: the sum stops once the next shell contributes less
/// than 1e-16 of the partial sum, but never before 200 shells.
template <typename Scalar = std::complex<double>>
Scalar oracle_radial_sum_to(const FieldParams& fp,
                            const std::function<Scalar(int)>& weights,
                            int n_high) {
  constexpr int kMinTerms = 200;
  constexpr int kMaxTerms = 20000;
  Scalar acc{};
  for (int i = 0; i < kMaxTerms; ++i) {
    const int k = n_high - i;
    const Scalar term = sphere_volume<double>(fp, k) * weights(k);
    acc += term;
    if (i + 1 >= kMinTerms && std::abs(term) <= 1e-16 * std::abs(acc)) {
      break;
    }
  }
  return acc;
}

}  // namespace radfrac
