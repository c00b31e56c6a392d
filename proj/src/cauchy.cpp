#include "radfrac/cauchy.hpp"
#include "radfrac/radial_io.hpp"

#include <algorithm>
#include <cmath>

namespace radfrac {

namespace {

constexpr double kDecayEps = 1e-2;
constexpr int kEnvelopeLevels = 5;

std::string grid_text(const LevelGrid& g) {
  return "[" + std::to_string(g.n_min) + ", " + std::to_string(g.n_max) + "]";
}

void validate(const CauchyProblem& p) {
  if (!(p.a.field() == p.fp) || !(p.f.field() == p.fp)) {
    throw ValidationError("a and f must use q = " + std::to_string(p.fp.q()));
  }
  if (!(p.a.grid() == p.f.grid())) {
    throw ValidationError("a on " + grid_text(p.a.grid()) + " and f on " +
                          grid_text(p.f.grid()) + " must share one level grid");
  }
  if (!std::isfinite(p.u0.real()) || !std::isfinite(p.u0.imag())) {
    throw ValidationError("u0 is not finite");
  }
}

Eigen::VectorXcd initial_vector(const MatrixCauchyProblem& p) {
  return p.u0.size() == 0 ? Eigen::VectorXcd::Zero(p.a.dim()) : p.u0;
}

void validate(const MatrixCauchyProblem& p) {
  const int d = p.a.dim();
  if (!(p.a.field() == p.fp)) {
    throw ValidationError("a must use q = " + std::to_string(p.fp.q()));
  }
  if (static_cast<int>(p.f.size()) != d) {
    throw ValidationError("f has " + std::to_string(p.f.size()) +
                          " components, a is " + std::to_string(d) + "x" + std::to_string(d));
  }
  for (std::size_t i = 0; i < p.f.size(); ++i) {
    if (!(p.f[i].field() == p.fp) || !(p.f[i].grid() == p.a.grid())) {
      throw ValidationError("f component " + std::to_string(i) +
                            " must share q and the level grid " + grid_text(p.a.grid()));
    }
  }
  if (p.u0.size() != 0 && p.u0.size() != d) {
    throw ValidationError("u0 has " + std::to_string(p.u0.size()) + " entries, expected " +
                          std::to_string(d));
  }
}

/// q^-alpha q^(alpha n), the factor multiplying a in the pivot.
double pivot_weight(const FieldParams& fp, const AlphaOrder& a, int n) {
  return fp.pow(a.value() * (n - 1.0));
}

cd scalar_pivot(const FieldParams& fp, const AlphaOrder& a, cd a_n, int n) {
  return 1.0 + pivot_weight(fp, a, n) * a_n;
}

Eigen::MatrixXcd matrix_pivot(const FieldParams& fp, const AlphaOrder& a,
                              const Eigen::MatrixXcd& a_n, int n) {
  return Eigen::MatrixXcd::Identity(a_n.rows(), a_n.cols()) + pivot_weight(fp, a, n) * a_n;
}

double smallest_singular_value(const Eigen::MatrixXcd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues().minCoeff();
}

/// Calls visit(level, size) on the head levels below n_min, top down, until
/// the coefficient is negligible against the identity.
template <typename Visit>
void scan_head(const FieldParams& fp, const AlphaOrder& a, int n_min, double coef_norm,
               Visit visit) {
  constexpr int kMaxHead = 100000;
  for (int n = n_min - 1, i = 0; i < kMaxHead; --n, ++i) {
    if (pivot_weight(fp, a, n) * coef_norm < 1e-3) break;
    visit(n);
  }
}

void record(SpectralReport& r, int level, double size, double tolerance) {
  if (size < r.min_pivot) {
    r.min_pivot = size;
    r.min_pivot_level = level;
  }
  if (size < tolerance) {
    r.ok = false;
    r.offending_levels.push_back(level);
  }
}

void finish(SpectralReport& r) {
  std::sort(r.offending_levels.begin(), r.offending_levels.end());
}

void throw_first_offender(const SpectralReport& r, const std::function<double(int)>& size) {
  const int level = r.offending_levels.front();
  throw SingularPivotError(level, size(level));
}

void add_pivot_warning(std::vector<std::string>& warnings, double min_pivot, int level) {
  if (min_pivot < kIllConditionedPivot) {
    warnings.push_back("ill-conditioned pivot " + format_real(min_pivot) + " at level " +
                       std::to_string(level));
  }
}

void add_alpha_warnings(std::vector<std::string>& warnings, const FieldParams& fp,
                        const AlphaOrder& a) {
  if (a.near_pole(fp)) {
    warnings.push_back("alpha is within 1e-6 of the c_alpha pole; power-kernel sums lose accuracy");
  }
}

/// Above the grid v = f - a u0 - a I v, which reduces to f when a vanishes
/// there. Otherwise no closed form is available.
TailModel solution_tail(bool a_vanishes_above, const TailModel& f_tail,
                        std::vector<std::string>& warnings) {
  if (a_vanishes_above) return f_tail;
  warnings.push_back("v tail truncated to zero: a does not vanish above the grid");
  return TailModel::zero();
}

/// Is the tail bounded by C q^(-rate l) for large l?
bool tail_decays(const TailModel& t, double rate) {
  if (t.offset() != cd{} || t.slope() != cd{}) return false;
  return std::all_of(t.terms().begin(), t.terms().end(),
                     [&](const PowerTerm& p) { return p.exponent <= -rate; });
}

/// Fits C over the positive grid levels and flags an envelope that is still
/// growing strictly over the last few of them.
struct Envelope {
  double c = 0.0;
  bool growing = false;
};

Envelope fit_envelope(const RadialFunction& g, double rate) {
  Envelope e;
  std::vector<double> scaled;
  for (int n = std::max(1, g.grid().n_min); n <= g.grid().n_max; ++n) {
    scaled.push_back(std::abs(g.at(n)) * g.field().pow(n * rate));
  }
  for (double s : scaled) e.c = std::max(e.c, s);
  const int k = std::min<int>(kEnvelopeLevels, static_cast<int>(scaled.size()));
  if (k >= 2) {
    e.growing = true;
    for (int i = static_cast<int>(scaled.size()) - k; i + 1 < static_cast<int>(scaled.size()); ++i) {
      if (!(scaled[i + 1] > scaled[i])) e.growing = false;
    }
  }
  return e;
}

/// u = u0 + I v together with D u. D u is taken from I v directly: D kills
/// the constant, and adding u0 first would round away the small values of
/// I v near zero that D then rescales by q^(-alpha n).
struct Solution {
  RadialFunction u;
  Eigen::VectorXcd du;
};

Solution solution_u(const FieldParams& fp, const RadialFunction& v, const AlphaOrder& a,
                    cd u0) {
  const RadialFunction iv = apply_I(v, a);
  return {constant_function(fp, v.grid(), u0) + iv, apply_D(iv, a).values()};
}

double head_bound(const FieldParams& fp, const AlphaOrder& a, const RadialFunction& coef,
                  const Eigen::VectorXcd& v, cd head) {
  const LevelGrid& g = coef.grid();
  double variation = 0.0;
  for (int i = 0; i < std::min(2, g.size()); ++i) {
    variation = std::max(variation, std::abs(v[i] - head));
  }
  // Weight of the head levels inside J_n, per unit of v.
  LowerIntegral<double> weight(fp, a, g.n_min, 1.0);
  const double kernel = std::abs(lower_integral_factor(fp, a));
  double bound = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const int n = g.n_min + i;
    const double piv = std::abs(scalar_pivot(fp, a, coef.values()[i], n));
    bound = std::max(bound, std::abs(coef.values()[i]) * kernel * std::abs(weight.value()) / piv);
    weight.push(0.0);
  }
  return bound * variation;
}

}  // namespace

SpectralReport check_spectral_condition(const CauchyProblem& p, double tolerance) {
  validate(p);
  SpectralReport r;
  const LevelGrid& g = p.a.grid();
  scan_head(p.fp, p.order, g.n_min, std::abs(p.a.value_at_zero()), [&](int n) {
    record(r, n, std::abs(scalar_pivot(p.fp, p.order, p.a.value_at_zero(), n)), tolerance);
  });
  for (int n = g.n_min; n <= g.n_max; ++n) {
    record(r, n, std::abs(scalar_pivot(p.fp, p.order, p.a.at(n), n)), tolerance);
  }
  finish(r);
  return r;
}

SpectralReport check_spectral_condition(const MatrixCauchyProblem& p, double tolerance) {
  validate(p);
  SpectralReport r;
  const LevelGrid& g = p.a.grid();
  const Eigen::MatrixXcd& a0 = p.a.value_at_zero();
  scan_head(p.fp, p.order, g.n_min, a0.norm(), [&](int n) {
    record(r, n, smallest_singular_value(matrix_pivot(p.fp, p.order, a0, n)), tolerance);
  });
  for (int n = g.n_min; n <= g.n_max; ++n) {
    record(r, n, smallest_singular_value(matrix_pivot(p.fp, p.order, p.a.at(n), n)), tolerance);
  }
  finish(r);
  return r;
}

DecayReport check_decay_hypothesis(const CauchyProblem& p, double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be > 0");
  validate(p);
  const double alpha = p.order.value();
  DecayReport r;
  const Envelope ea = fit_envelope(p.a, alpha + eps);
  const Envelope ef = fit_envelope(p.f, eps);
  r.c_a = ea.c;
  r.c_f = ef.c;
  r.a_ok = tail_decays(p.a.tail(), alpha + eps) && !ea.growing;
  r.f_ok = tail_decays(p.f.tail(), eps) && !ef.growing;
  r.satisfied = r.a_ok && r.f_ok;
  if (r.satisfied) {
    r.note = "ok";
  } else {
    if (!r.a_ok) r.note += "a does not decay like |x|^-(alpha+eps). ";
    if (!r.f_ok) r.note += "f does not decay like |x|^-eps. ";
    r.note.pop_back();
  }
  return r;
}

int residual_margin(const AlphaOrder& a) {
  return static_cast<int>(std::ceil(20.0 / a.value()));
}

namespace {

ResidualReport residual_with(const CauchyProblem& p, const RadialFunction& u,
                             const Eigen::VectorXcd& du) {
  ResidualReport r;
  r.values = du.array() + p.a.values().array() * u.values().array() - p.f.values().array();
  const int size = p.a.grid().size();
  r.margin = residual_margin(p.order);
  r.trusted.assign(size, false);
  bool any = false;
  for (int i = r.margin; i < size - r.margin; ++i) {
    r.trusted[i] = true;
    any = true;
  }
  if (!any) {
    r.warnings.push_back("grid too short for a trusted interior; residual_max covers every level");
    r.trusted.assign(size, true);
  }
  for (int i = 0; i < size; ++i) {
    if (r.trusted[i]) r.residual_max = std::max(r.residual_max, std::abs(r.values[i]));
  }
  return r;
}

}  // namespace

ResidualReport residual(const CauchyProblem& p, const RadialFunction& u) {
  validate(p);
  if (!(u.field() == p.fp) || !(u.grid() == p.a.grid())) {
    throw ValidationError("u must live on the problem grid " + grid_text(p.a.grid()));
  }
  return residual_with(p, u, apply_D(u, p.order).values());
}

namespace {

SolveReport finish_scalar(const CauchyProblem& p, Eigen::VectorXcd v_values, cd head,
                          const SpectralReport& spectral, std::vector<std::string> warnings) {
  add_pivot_warning(warnings, spectral.min_pivot, spectral.min_pivot_level);
  add_alpha_warnings(warnings, p.fp, p.order);
  const DecayReport decay = check_decay_hypothesis(p, kDecayEps);
  if (!decay.satisfied) warnings.push_back(kNonDecayingWarning);

  const double bound = head_bound(p.fp, p.order, p.a, v_values, head);
  TailModel tail = solution_tail(p.a.tail().vanishes(), p.f.tail(), warnings);
  RadialFunction v(p.fp, p.a.grid(), std::move(v_values), head, std::move(tail));
  Solution sol = solution_u(p.fp, v, p.order, p.u0);
  ResidualReport res = residual_with(p, sol.u, sol.du);
  warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
  return SolveReport{std::move(v),        std::move(sol.u), spectral.min_pivot, res.residual_max,
                     std::move(warnings), bound,        0,                  {}};
}

SpectralReport require_regular(const CauchyProblem& p, double tolerance) {
  const SpectralReport spectral = check_spectral_condition(p, tolerance);
  if (!spectral.ok) {
    throw_first_offender(spectral, [&](int n) {
      const cd a_n = p.a.grid().contains(n) ? p.a.at(n) : p.a.value_at_zero();
      return std::abs(scalar_pivot(p.fp, p.order, a_n, n));
    });
  }
  return spectral;
}

}  // namespace

SolveReport solve_direct(const CauchyProblem& p, double pivot_tolerance) {
  const SpectralReport spectral = require_regular(p, pivot_tolerance);
  const LevelGrid& g = p.a.grid();
  const double kernel = lower_integral_factor(p.fp, p.order);
  const cd head = p.f.value_at_zero() - p.a.value_at_zero() * p.u0;

  Eigen::VectorXcd v(g.size());
  LowerIntegral<cd> lower(p.fp, p.order, g.n_min, head);
  for (int i = 0; i < g.size(); ++i) {
    const int n = g.n_min + i;
    const cd a_n = p.a.values()[i];
    const cd rhs = p.f.values()[i] - a_n * p.u0 - a_n * kernel * lower.value();
    v[i] = rhs / scalar_pivot(p.fp, p.order, a_n, n);
    lower.push(v[i]);
  }
  return finish_scalar(p, std::move(v), head, spectral, {});
}

SolveReport solve_picard(const CauchyProblem& p, int max_iter, double tol,
                         double pivot_tolerance) {
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  const SpectralReport spectral = require_regular(p, pivot_tolerance);
  const LevelGrid& g = p.a.grid();
  const double kernel = lower_integral_factor(p.fp, p.order);
  const cd head = p.f.value_at_zero() - p.a.value_at_zero() * p.u0;

  // v = F - K v with F = (f - a u0) / pivot and K = a k J / pivot.
  Eigen::VectorXcd rhs(g.size());
  Eigen::VectorXcd coupling(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const int n = g.n_min + i;
    const cd a_n = p.a.values()[i];
    const cd piv = scalar_pivot(p.fp, p.order, a_n, n);
    rhs[i] = (p.f.values()[i] - a_n * p.u0) / piv;
    coupling[i] = a_n * kernel / piv;
  }

  Eigen::VectorXcd v = rhs;
  std::vector<double> diffs;
  bool converged = false;
  while (static_cast<int>(diffs.size()) < max_iter) {
    Eigen::VectorXcd next(g.size());
    LowerIntegral<cd> lower(p.fp, p.order, g.n_min, head);
    for (int i = 0; i < g.size(); ++i) {
      next[i] = rhs[i] - coupling[i] * lower.value();
      lower.push(v[i]);
    }
    const double diff = (next - v).cwiseAbs().maxCoeff();
    diffs.push_back(diff);
    v = std::move(next);
    if (diff <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NoConvergenceError("Picard iteration: no convergence after " +
                             std::to_string(max_iter) + " iterations (last difference " +
                             std::to_string(diffs.back()) + ")");
  }
  SolveReport report = finish_scalar(p, std::move(v), head, spectral, {});
  report.iterations = static_cast<int>(diffs.size());
  report.iterate_diffs = std::move(diffs);
  return report;
}

namespace {
double matrix_residual_max(const MatrixCauchyProblem& p, const RadialVector& u,
                           const std::vector<Eigen::VectorXcd>& du);
}  // namespace

MatrixSolveReport solve_matrix(const MatrixCauchyProblem& p, double pivot_tolerance) {
  validate(p);
  const SpectralReport spectral = check_spectral_condition(p, pivot_tolerance);
  if (!spectral.ok) {
    throw_first_offender(spectral, [&](int n) {
      const Eigen::MatrixXcd a_n = p.a.grid().contains(n) ? p.a.at(n) : p.a.value_at_zero();
      return smallest_singular_value(matrix_pivot(p.fp, p.order, a_n, n));
    });
  }
  const LevelGrid& g = p.a.grid();
  const int d = p.a.dim();
  const double kernel = lower_integral_factor(p.fp, p.order);
  const Eigen::VectorXcd u0 = initial_vector(p);

  auto f_at = [&](int n) {
    Eigen::VectorXcd out(d);
    for (int c = 0; c < d; ++c) out[c] = n < g.n_min ? p.f[c].value_at_zero() : p.f[c].at(n);
    return out;
  };
  const Eigen::VectorXcd head = f_at(g.n_min - 1) - p.a.value_at_zero() * u0;

  std::vector<Eigen::VectorXcd> v(g.size());
  LowerIntegral<Eigen::VectorXcd> lower(p.fp, p.order, g.n_min, head);
  for (int i = 0; i < g.size(); ++i) {
    const int n = g.n_min + i;
    const Eigen::MatrixXcd& a_n = p.a.values()[i];
    const Eigen::VectorXcd rhs = f_at(n) - a_n * u0 - kernel * (a_n * lower.value());
    v[i] = matrix_pivot(p.fp, p.order, a_n, n).partialPivLu().solve(rhs);
    lower.push(v[i]);
  }

  MatrixSolveReport report;
  report.min_pivot = spectral.min_pivot;
  add_pivot_warning(report.warnings, spectral.min_pivot, spectral.min_pivot_level);
  add_alpha_warnings(report.warnings, p.fp, p.order);
  const bool a_vanishes_above = !p.a.tail().is_constant || p.a.tail().c.isZero(0.0);
  std::vector<Eigen::VectorXcd> du;
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXcd values(g.size());
    for (int i = 0; i < g.size(); ++i) values[i] = v[i][c];
    TailModel tail = solution_tail(a_vanishes_above, p.f[c].tail(), report.warnings);
    report.v.emplace_back(p.fp, g, std::move(values), head[c], std::move(tail));
    Solution sol = solution_u(p.fp, report.v.back(), p.order, u0[c]);
    report.u.push_back(std::move(sol.u));
    du.push_back(std::move(sol.du));
  }
  // One warning per component is noise.
  std::sort(report.warnings.begin(), report.warnings.end());
  report.warnings.erase(std::unique(report.warnings.begin(), report.warnings.end()),
                        report.warnings.end());
  report.residual_max = matrix_residual_max(p, report.u, du);
  return report;
}

double residual_max(const MatrixCauchyProblem& p, const RadialVector& u) {
  validate(p);
  if (static_cast<int>(u.size()) != p.a.dim()) {
    throw ValidationError("u has " + std::to_string(u.size()) + " components, expected " +
                          std::to_string(p.a.dim()));
  }
  std::vector<Eigen::VectorXcd> du;
  for (const auto& comp : u) {
    if (!(comp.grid() == p.a.grid())) {
      throw ValidationError("u must live on the problem grid " + grid_text(p.a.grid()));
    }
    du.push_back(apply_D(comp, p.order).values());
  }
  return matrix_residual_max(p, u, du);
}

namespace {

double matrix_residual_max(const MatrixCauchyProblem& p, const RadialVector& u,
                           const std::vector<Eigen::VectorXcd>& du) {
  const LevelGrid& g = p.a.grid();
  const int d = p.a.dim();
  const int margin = residual_margin(p.order);
  const bool interior = g.size() > 2 * margin;
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (interior && (i < margin || i >= g.size() - margin)) continue;
    const Eigen::MatrixXcd& a_n = p.a.values()[i];
    for (int c = 0; c < d; ++c) {
      cd r = du[c][i] - p.f[c].values()[i];
      for (int k = 0; k < d; ++k) r += a_n(c, k) * u[k].values()[i];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

}  // namespace

}  // namespace radfrac
