#pragma once

// Radial functions u = u(|x|) stored on a finite window of levels
// n_min..n_max (|x| = q^n), with explicit models for the levels below and
// above the window:
//
//   head (n < n_min):  u(q^n) = value_at_zero
//   tail (n > n_max):  one of the TailModel kinds below
//
// The head model is what makes the lower sums of the operators closed-form
// geometric series; the tail kinds are exactly those whose sums against
// q^(-alpha l) have closed forms.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "radfrac/errors.hpp"
#include "radfrac/local_field.hpp"

namespace radfrac {

using cd = std::complex<double>;

struct LevelGrid {
  int n_min = 0;
  int n_max = 0;

  LevelGrid() = default;
  LevelGrid(int lo, int hi);

  int size() const { return n_max - n_min + 1; }
  bool contains(int n) const { return n >= n_min && n <= n_max; }
  Eigen::Index index(int n) const { return n - n_min; }

  friend bool operator==(const LevelGrid&, const LevelGrid&) = default;
};

/// scale * |x|^exponent, i.e. scale * q^(exponent * l) on level l.
struct PowerTerm {
  cd scale;
  double exponent = 0.0;

  friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};

/// Values above n_max:
///
///   t(l) = c + s l + sum_j s_j q^(beta_j l)        (l = log_q |x|)
///
/// Zero, Constant, Power (no log part) and Log (no power part) name the
/// common special cases; Mixed has both. Power, Log and Mixed tails are
/// what the operators produce as exact continuations of their outputs.
class TailModel {
 public:
  enum class Kind { Zero, Constant, Power, Log, Mixed };

  TailModel() = default;

  static TailModel zero() { return {}; }
  static TailModel constant(cd c);
  static TailModel power(cd offset, std::vector<PowerTerm> terms);
  static TailModel log(cd offset, cd slope);
  static TailModel general(cd offset, cd slope, std::vector<PowerTerm> terms);

  Kind kind() const;
  cd offset() const { return offset_; }
  cd slope() const { return slope_; }
  const std::vector<PowerTerm>& terms() const { return terms_; }

  /// Identically zero above the grid.
  bool vanishes() const {
    return offset_ == cd{} && slope_ == cd{} && terms_.empty();
  }
  /// Zero or Constant.
  bool is_constant_like() const { return slope_ == cd{} && terms_.empty(); }

  cd eval(const FieldParams& fp, int level) const;

  /// The same tail seen after the substitution l -> l + shift.
  TailModel shifted(const FieldParams& fp, int shift) const;

  friend bool operator==(const TailModel&, const TailModel&) = default;

 private:
  cd offset_{};
  cd slope_{};
  std::vector<PowerTerm> terms_;
};

TailModel operator+(const TailModel& a, const TailModel& b);
TailModel operator*(cd s, const TailModel& a);

class RadialFunction {
 public:
  RadialFunction(FieldParams fp, LevelGrid grid, Eigen::VectorXcd values,
                 cd value_at_zero, TailModel tail);

  const FieldParams& field() const { return fp_; }
  const LevelGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  cd value_at_zero() const { return value_at_zero_; }
  const TailModel& tail() const { return tail_; }

  /// Total: grid lookup, head model below, tail model above.
  cd at(int n) const;
  cd operator()(int n) const { return at(n); }

  friend bool operator==(const RadialFunction&, const RadialFunction&);

 private:
  FieldParams fp_;
  LevelGrid grid_;
  Eigen::VectorXcd values_;
  cd value_at_zero_;
  TailModel tail_;
};

RadialFunction make_radial(const FieldParams& fp, const LevelGrid& grid,
                           Eigen::VectorXcd values, cd value_at_zero,
                           TailModel tail);

inline cd eval_at_level(const RadialFunction& u, int n) { return u.at(n); }

/// c everywhere, including head and tail.
RadialFunction constant_function(const FieldParams& fp, const LevelGrid& grid,
                                 cd c);

/// 1 on the sphere |x| = q^level, 0 elsewhere.
RadialFunction sphere_indicator(const FieldParams& fp, int level);

// Pointwise linear operations. Operands must share q and grid.
RadialFunction operator+(const RadialFunction& a, const RadialFunction& b);
RadialFunction operator-(const RadialFunction& a, const RadialFunction& b);
RadialFunction operator*(cd s, const RadialFunction& a);

/// Same function, re-sampled on [lo, hi]. The window must contain the
/// current one; extension models supply the new levels.
RadialFunction widen(const RadialFunction& u, int lo, int hi);

/// u'(q^n) = u(q^(n + shift)); the grid moves down by `shift`.
RadialFunction shift_levels(const RadialFunction& u, int shift);

/// Vector-valued radial function, one scalar function per component.
using RadialVector = std::vector<RadialFunction>;

/// Matrix tail: Zero, or the same constant matrix on every level above the
/// window.
struct MatrixTail {
  bool is_constant = false;
  Eigen::MatrixXcd c;

  static MatrixTail zero() { return {}; }
  static MatrixTail constant(Eigen::MatrixXcd m) { return {true, std::move(m)}; }
};

class MatrixRadialFunction {
 public:
  MatrixRadialFunction(FieldParams fp, LevelGrid grid, int dim,
                       std::vector<Eigen::MatrixXcd> values,
                       Eigen::MatrixXcd value_at_zero, MatrixTail tail);

  const FieldParams& field() const { return fp_; }
  const LevelGrid& grid() const { return grid_; }
  int dim() const { return dim_; }
  const std::vector<Eigen::MatrixXcd>& values() const { return values_; }
  const Eigen::MatrixXcd& value_at_zero() const { return value_at_zero_; }
  const MatrixTail& tail() const { return tail_; }

  Eigen::MatrixXcd at(int n) const;

  /// Entry (i, j) as a scalar radial function.
  RadialFunction entry(int i, int j) const;

 private:
  FieldParams fp_;
  LevelGrid grid_;
  int dim_;
  std::vector<Eigen::MatrixXcd> values_;
  Eigen::MatrixXcd value_at_zero_;
  MatrixTail tail_;
};

/// 1x1 matrix function carrying the values of a scalar one (tail must be
/// Zero or Constant).
MatrixRadialFunction as_matrix(const RadialFunction& a);

}  // namespace radfrac
