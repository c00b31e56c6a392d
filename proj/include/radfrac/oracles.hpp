#pragma once

// Brute-force references for the closed forms. Each one re-derives its
// quantity from the sphere decomposition of the field, summing shell by
// shell with adaptive truncation instead of using geometric-series closures.
// Slow and independent of the fast paths; meant for tests and `verify`.

#include "radfrac/riesz.hpp"

namespace radfrac::oracle {

// Integration formulas, summed over shells.
double ball_integral_power(const FieldParams& fp, double alpha, int n);
double sphere_integral_shifted_power(const FieldParams& fp, double alpha, int n);
double ball_integral_log(const FieldParams& fp, int n);
double sphere_integral_shifted_log(const FieldParams& fp, int n);

/// D^alpha u at level n from the hypersingular difference form
///   d_alpha * int |y|^(-alpha-1) (u(x - y) - u(x)) dy,   |x| = q^n.
cd apply_D_at(const RadialFunction& u, const AlphaOrder& a, int n);

/// I^alpha u at level n as D^-alpha u(x) - D^-alpha u(0), i.e. the Riesz
/// kernel integrated against u over the whole field with the |y| = |x| shell
/// split into sub-spheres around x.
cd apply_I_at(const RadialFunction& u, const AlphaOrder& a, int n);

/// int_{|y| < q^n} | |x|^(a-1) - |y|^(a-1) | |y|^(a m) dy (log kernel and
/// |y|^m on the log branch).
double moment_integral(const FieldParams& fp, const AlphaOrder& a, int m, int n);

}  // namespace radfrac::oracle
