#include "radfrac/radial_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace radfrac {

namespace {

bool finite(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_finite(cd z, const std::string& what) {
  if (!finite(z)) {
    throw ValidationError(what + " is not finite");
  }
}

void require_same_domain(const RadialFunction& a, const RadialFunction& b) {
  if (!(a.field() == b.field())) {
    throw ValidationError("radial functions over different q");
  }
  if (!(a.grid() == b.grid())) {
    throw ValidationError("radial functions on different level grids");
  }
}

}  // namespace

LevelGrid::LevelGrid(int lo, int hi) : n_min(lo), n_max(hi) {
  if (lo > hi) {
    throw ValidationError("level grid: n_min (" + std::to_string(lo) +
                          ") > n_max (" + std::to_string(hi) + ")");
  }
}

TailModel TailModel::constant(cd c) { return general(c, cd{}, {}); }

TailModel TailModel::power(cd offset, std::vector<PowerTerm> terms) {
  return general(offset, cd{}, std::move(terms));
}

TailModel TailModel::log(cd offset, cd slope) { return general(offset, slope, {}); }

TailModel TailModel::general(cd offset, cd slope, std::vector<PowerTerm> terms) {
  require_finite(offset, "tail offset");
  require_finite(slope, "tail slope");
  TailModel t;
  t.offset_ = offset;
  t.slope_ = slope;
  for (const auto& term : terms) {
    require_finite(term.scale, "tail power scale");
    if (!std::isfinite(term.exponent)) {
      throw ValidationError("tail power exponent is not finite");
    }
    if (term.scale == cd{}) continue;
    auto same = std::find_if(t.terms_.begin(), t.terms_.end(), [&](const PowerTerm& p) {
      return p.exponent == term.exponent;
    });
    if (same != t.terms_.end()) {
      same->scale += term.scale;
    } else {
      t.terms_.push_back(term);
    }
  }
  std::erase_if(t.terms_, [](const PowerTerm& p) { return p.scale == cd{}; });
  return t;
}

TailModel::Kind TailModel::kind() const {
  const bool has_log = slope_ != cd{};
  const bool has_power = !terms_.empty();
  if (has_log && has_power) return Kind::Mixed;
  if (has_log) return Kind::Log;
  if (has_power) return Kind::Power;
  return offset_ == cd{} ? Kind::Zero : Kind::Constant;
}

cd TailModel::eval(const FieldParams& fp, int level) const {
  cd acc = offset_ + slope_ * static_cast<double>(level);
  for (const auto& term : terms_) {
    acc += term.scale * fp.pow(term.exponent * level);
  }
  return acc;
}

TailModel TailModel::shifted(const FieldParams& fp, int shift) const {
  auto terms = terms_;
  for (auto& term : terms) term.scale *= fp.pow(term.exponent * shift);
  return general(offset_ + slope_ * static_cast<double>(shift), slope_, std::move(terms));
}

TailModel operator+(const TailModel& a, const TailModel& b) {
  auto terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return TailModel::general(a.offset() + b.offset(), a.slope() + b.slope(),
                            std::move(terms));
}

TailModel operator*(cd s, const TailModel& a) {
  auto terms = a.terms();
  for (auto& term : terms) term.scale *= s;
  return TailModel::general(s * a.offset(), s * a.slope(), std::move(terms));
}

RadialFunction::RadialFunction(FieldParams fp, LevelGrid grid,
                               Eigen::VectorXcd values, cd value_at_zero,
                               TailModel tail)
    : fp_(fp),
      grid_(grid),
      values_(std::move(values)),
      value_at_zero_(value_at_zero),
      tail_(std::move(tail)) {
  if (grid_.n_min > grid_.n_max) {
    throw ValidationError("level grid: n_min > n_max");
  }
  if (values_.size() != grid_.size()) {
    throw ValidationError("radial function: " + std::to_string(values_.size()) +
                          " values for a grid of " +
                          std::to_string(grid_.size()) + " levels");
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    require_finite(values_[i], "value at level " +
                                   std::to_string(grid_.n_min + i));
  }
  require_finite(value_at_zero_, "value_at_zero");
}

cd RadialFunction::at(int n) const {
  if (n < grid_.n_min) return value_at_zero_;
  if (n > grid_.n_max) return tail_.eval(fp_, n);
  return values_[grid_.index(n)];
}

bool operator==(const RadialFunction& a, const RadialFunction& b) {
  return a.fp_ == b.fp_ && a.grid_ == b.grid_ && a.values_ == b.values_ &&
         a.value_at_zero_ == b.value_at_zero_ && a.tail_ == b.tail_;
}

RadialFunction make_radial(const FieldParams& fp, const LevelGrid& grid,
                           Eigen::VectorXcd values, cd value_at_zero,
                           TailModel tail) {
  return RadialFunction(fp, grid, std::move(values), value_at_zero,
                        std::move(tail));
}

RadialFunction constant_function(const FieldParams& fp, const LevelGrid& grid,
                                 cd c) {
  return RadialFunction(fp, grid, Eigen::VectorXcd::Constant(grid.size(), c), c,
                        TailModel::constant(c));
}

RadialFunction sphere_indicator(const FieldParams& fp, int level) {
  return RadialFunction(fp, LevelGrid(level, level),
                        Eigen::VectorXcd::Ones(1), cd{}, TailModel::zero());
}

RadialFunction operator+(const RadialFunction& a, const RadialFunction& b) {
  require_same_domain(a, b);
  return RadialFunction(a.field(), a.grid(), a.values() + b.values(),
                        a.value_at_zero() + b.value_at_zero(),
                        a.tail() + b.tail());
}

RadialFunction operator*(cd s, const RadialFunction& a) {
  return RadialFunction(a.field(), a.grid(), s * a.values(),
                        s * a.value_at_zero(), s * a.tail());
}

RadialFunction operator-(const RadialFunction& a, const RadialFunction& b) {
  return a + cd(-1.0) * b;
}

RadialFunction widen(const RadialFunction& u, int lo, int hi) {
  const LevelGrid grid(lo, hi);
  if (lo > u.grid().n_min || hi < u.grid().n_max) {
    throw ValidationError("widen: new window must contain the old one");
  }
  Eigen::VectorXcd values(grid.size());
  for (int n = lo; n <= hi; ++n) values[grid.index(n)] = u.at(n);
  return RadialFunction(u.field(), grid, std::move(values), u.value_at_zero(),
                        u.tail());
}

RadialFunction shift_levels(const RadialFunction& u, int shift) {
  const LevelGrid grid(u.grid().n_min - shift, u.grid().n_max - shift);
  return RadialFunction(u.field(), grid, u.values(), u.value_at_zero(),
                        u.tail().shifted(u.field(), shift));
}

MatrixRadialFunction::MatrixRadialFunction(FieldParams fp, LevelGrid grid,
                                           int dim,
                                           std::vector<Eigen::MatrixXcd> values,
                                           Eigen::MatrixXcd value_at_zero,
                                           MatrixTail tail)
    : fp_(fp),
      grid_(grid),
      dim_(dim),
      values_(std::move(values)),
      value_at_zero_(std::move(value_at_zero)),
      tail_(std::move(tail)) {
  if (dim_ < 1) throw ValidationError("matrix dimension must be >= 1");
  if (static_cast<int>(values_.size()) != grid_.size()) {
    throw ValidationError("matrix radial function: value count does not match grid");
  }
  auto check = [&](const Eigen::MatrixXcd& m, const std::string& what) {
    if (m.rows() != dim_ || m.cols() != dim_) {
      throw ValidationError(what + " is not " + std::to_string(dim_) + "x" +
                            std::to_string(dim_));
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      require_finite(m.data()[i], what);
    }
  };
  for (int n = grid_.n_min; n <= grid_.n_max; ++n) {
    check(values_[grid_.index(n)], "matrix at level " + std::to_string(n));
  }
  check(value_at_zero_, "value_at_zero");
  if (tail_.is_constant) check(tail_.c, "tail constant");
}

Eigen::MatrixXcd MatrixRadialFunction::at(int n) const {
  if (n < grid_.n_min) return value_at_zero_;
  if (n > grid_.n_max) {
    return tail_.is_constant ? tail_.c : Eigen::MatrixXcd::Zero(dim_, dim_);
  }
  return values_[grid_.index(n)];
}

RadialFunction MatrixRadialFunction::entry(int i, int j) const {
  Eigen::VectorXcd v(grid_.size());
  for (int n = grid_.n_min; n <= grid_.n_max; ++n) {
    v[grid_.index(n)] = values_[grid_.index(n)](i, j);
  }
  return RadialFunction(fp_, grid_, std::move(v), value_at_zero_(i, j),
                        tail_.is_constant ? TailModel::constant(tail_.c(i, j))
                                          : TailModel::zero());
}

MatrixRadialFunction as_matrix(const RadialFunction& a) {
  if (!a.tail().is_constant_like()) {
    throw UnsupportedTailError("matrix coefficients support zero or constant tails only");
  }
  std::vector<Eigen::MatrixXcd> values;
  values.reserve(a.grid().size());
  for (Eigen::Index i = 0; i < a.values().size(); ++i) {
    values.push_back(Eigen::MatrixXcd::Constant(1, 1, a.values()[i]));
  }
  MatrixTail tail = a.tail().offset() != cd{}
                        ? MatrixTail::constant(
                              Eigen::MatrixXcd::Constant(1, 1, a.tail().offset()))
                        : MatrixTail::zero();
  return MatrixRadialFunction(a.field(), a.grid(), 1, std::move(values),
                              Eigen::MatrixXcd::Constant(1, 1, a.value_at_zero()),
                              std::move(tail));
}

}  // namespace radfrac
