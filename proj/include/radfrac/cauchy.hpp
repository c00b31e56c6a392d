#pragma once

// Cauchy problem D^alpha u + a u = f, u(0) = u0, for radial data.
//
// With u = u0 + I^alpha v the problem becomes v + a I^alpha v = f - a u0.
// The kernel of I^alpha only couples a level to the levels below it, so the
// discrete system is lower triangular in the level index and one upward
// sweep solves it: on level n
//
//   pivot(n) v(q^n) = f(q^n) - a(q^n) u0 - a(q^n) k J_n[v],
//   pivot(n) = 1 + q^-alpha a(q^n) q^(alpha n),
//
// with k and J_n as in LowerIntegral. Below the grid v is closed by its value
// at zero, v(0) = f(0) - a(0) u0.

#include <optional>
#include <string>
#include <vector>

#include "radfrac/riesz.hpp"

namespace radfrac {

struct CauchyProblem {
  FieldParams fp;
  AlphaOrder order;
  RadialFunction a;
  RadialFunction f;
  cd u0{};
};

struct MatrixCauchyProblem {
  FieldParams fp;
  AlphaOrder order;
  MatrixRadialFunction a;
  RadialVector f;
  Eigen::VectorXcd u0;  // empty means zero
};

inline constexpr double kSingularPivot = 1e-9;
inline constexpr double kIllConditionedPivot = 1e-6;

struct SpectralReport {
  bool ok = true;
  double min_pivot = 1.0;  // |pivot|, or the smallest singular value
  int min_pivot_level = 0;
  std::vector<int> offending_levels;  // |pivot| < tolerance; head levels are < n_min
};

/// Pivots on every grid level and on the head levels below it (where a
/// takes its value at zero). Head levels are scanned downward until the
/// pivot is within 1e-3 of 1.
SpectralReport check_spectral_condition(const CauchyProblem& p,
                                        double tolerance = kSingularPivot);
SpectralReport check_spectral_condition(const MatrixCauchyProblem& p,
                                        double tolerance = kSingularPivot);

struct DecayReport {
  bool satisfied = true;
  bool a_ok = true;
  bool f_ok = true;
  double c_a = 0.0;  // max over positive grid levels of |a| q^(n(alpha+eps))
  double c_f = 0.0;  // max over positive grid levels of |f| q^(n eps)
  std::string note;
};

/// Empirical test of |a| <= C q^(-n(alpha+eps)), |f| <= C q^(-n eps) for
/// n > 0. The tail models decide beyond the grid; on the grid the envelope
/// must not still be growing over the last positive levels.
DecayReport check_decay_hypothesis(const CauchyProblem& p, double eps);

struct ResidualReport {
  Eigen::VectorXcd values;    // D^alpha u + a u - f per grid level
  std::vector<bool> trusted;  // at least `margin` levels from both edges
  int margin = 0;
  double residual_max = 0.0;  // over trusted levels
  std::vector<std::string> warnings;
};

/// Levels within ceil(20 / alpha) of either edge are not trusted.
int residual_margin(const AlphaOrder& a);

ResidualReport residual(const CauchyProblem& p, const RadialFunction& u);

struct SolveReport {
  RadialFunction v;
  RadialFunction u;
  double min_pivot = 1.0;
  double residual_max = 0.0;
  std::vector<std::string> warnings;
  /// First-order size of the error committed by closing v with v(0) below
  /// the grid.
  double head_truncation_bound = 0.0;
  int iterations = 0;                // Picard only
  std::vector<double> iterate_diffs;  // sup |v(m+1) - v(m)|, Picard only
};

inline constexpr const char* kNonDecayingWarning =
    "non-decaying data: \xCE\xA6\xE2\x80\xB2-sense solution only";

/// Throws SingularPivotError when some |pivot| < pivot_tolerance; pivots
/// below 1e-6 add a warning.
SolveReport solve_direct(const CauchyProblem& p, double pivot_tolerance = kSingularPivot);

/// v <- F - K v from v = F, stopping once sup |v(m+1) - v(m)| <= tol.
SolveReport solve_picard(const CauchyProblem& p, int max_iter = 500, double tol = 1e-14,
                         double pivot_tolerance = kSingularPivot);

struct MatrixSolveReport {
  RadialVector v;
  RadialVector u;
  double min_pivot = 1.0;  // smallest singular value of the level pivots
  double residual_max = 0.0;
  std::vector<std::string> warnings;
};

MatrixSolveReport solve_matrix(const MatrixCauchyProblem& p,
                               double pivot_tolerance = kSingularPivot);

/// Componentwise D^alpha u + a u - f; max over trusted levels.
double residual_max(const MatrixCauchyProblem& p, const RadialVector& u);

}  // namespace radfrac
