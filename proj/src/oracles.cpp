#include "radfrac/oracles.hpp"

#include <cmath>

namespace radfrac::oracle {

namespace {

constexpr int kMinTerms = 200;
constexpr int kMaxTerms = 20000;

using RealWeights = std::function<double(int)>;
using ComplexWeights = std::function<cd(int)>;

double shells_below(const FieldParams& fp, const RealWeights& w, int n_high) {
  return oracle_radial_sum_to<double>(fp, w, n_high);
}

cd shells_below(const FieldParams& fp, const ComplexWeights& w, int n_high) {
  return oracle_radial_sum_to<cd>(fp, w, n_high);
}

/// sum_{l > n} sphere_volume(l) w(l), truncated like the downward sums.
cd shells_above(const FieldParams& fp, const ComplexWeights& w, int n) {
  cd acc{};
  for (int i = 0; i < kMaxTerms; ++i) {
    const int l = n + 1 + i;
    const cd term = sphere_volume(fp, l) * w(l);
    acc += term;
    if (i + 1 >= kMinTerms && std::abs(term) <= 1e-16 * std::abs(acc)) break;
  }
  return acc;
}

/// Riesz kernel profile on level k: q^(k(alpha-1)), or k log q at alpha = 1.
double kernel_profile(const FieldParams& fp, const AlphaOrder& a, int k) {
  if (a.is_log_branch()) return k * fp.log_q();
  return fp.pow(k * (a.value() - 1.0));
}

}  // namespace

double ball_integral_power(const FieldParams& fp, double alpha, int n) {
  detail::require_positive_alpha(alpha);
  return shells_below(fp, RealWeights([&](int k) { return fp.pow(k * (alpha - 1.0)); }), n);
}

double sphere_integral_shifted_power(const FieldParams& fp, double alpha, int n) {
  detail::require_positive_alpha(alpha);
  // x - a lands on level k < n on a full sphere of x's; on level n only when
  // the leading digits of x and a differ.
  const RealWeights w = [&](int k) { return fp.pow(k * (alpha - 1.0)); };
  return shells_below(fp, w, n - 1) + sector_volume_excluded_digit(fp, n) * w(n);
}

double ball_integral_log(const FieldParams& fp, int n) {
  return shells_below(fp, RealWeights([&](int k) { return k * fp.log_q(); }), n);
}

double sphere_integral_shifted_log(const FieldParams& fp, int n) {
  const RealWeights w = [&](int k) { return k * fp.log_q(); };
  return shells_below(fp, w, n - 1) + sector_volume_excluded_digit(fp, n) * w(n);
}

cd apply_D_at(const RadialFunction& u, const AlphaOrder& a, int n) {
  const FieldParams& fp = u.field();
  const double alpha = a.value();
  const cd un = u.at(n);
  // |y| < |x|: x - y stays on level n and the difference vanishes.
  // |y| > |x|: |x - y| = |y|.
  const cd outer = shells_above(
      fp, [&](int l) { return fp.pow(-l * (1.0 + alpha)) * (u.at(l) - un); }, n);
  // |y| = |x|: x - y runs over the sub-spheres around x; |y|^(-alpha-1) is
  // constant on the shell. The part with |x - y| = q^n has u(x - y) = u(x).
  const cd shell =
      fp.pow(-n * (1.0 + alpha)) *
      shells_below(fp, ComplexWeights([&](int k) { return u.at(k) - un; }), n - 1);
  return constants(fp, a).d_alpha * (outer + shell);
}

cd apply_I_at(const RadialFunction& u, const AlphaOrder& a, int n) {
  const FieldParams& fp = u.field();
  const double prefactor = a.is_log_branch()
                               ? (1.0 - fp.qd()) / (fp.qd() * fp.log_q())
                               : 1.0 / gamma_K(fp, a.value());
  const double kn = kernel_profile(fp, a, n);
  // |y| < |x|: |x - y| = |x|.
  const cd inner = shells_below(
      fp, ComplexWeights([&](int k) { return (kn - kernel_profile(fp, a, k)) * u.at(k); }),
      n - 1);
  // |y| = |x|: u(y) = u(x); |x - y| spreads over every level <= n.
  const double spread =
      shells_below(fp, RealWeights([&](int k) { return kernel_profile(fp, a, k); }), n - 1) +
      sector_volume_excluded_digit(fp, n) * kn - sphere_volume(fp, n) * kn;
  // |y| > |x|: |x - y| = |y| and the integrand vanishes.
  return prefactor * (inner + spread * u.at(n));
}

double moment_integral(const FieldParams& fp, const AlphaOrder& a, int m, int n) {
  if (m < 0) throw ValidationError("moment index m must be >= 0");
  const double weight_exponent = a.is_log_branch() ? m : a.value() * m;
  const double kn = kernel_profile(fp, a, n);
  return shells_below(fp, RealWeights([&](int k) {
                        return std::abs(kn - kernel_profile(fp, a, k)) *
                               fp.pow(k * weight_exponent);
                      }),
                      n - 1);
}

}  // namespace radfrac::oracle
