#include "radfrac/riesz.hpp"

#include <algorithm>
#include <cmath>

namespace radfrac {

namespace {

constexpr double kLogBranchWidth = 1e-12;
constexpr double kExponentMatch = 1e-12;

double shell_factor(const FieldParams& fp) { return 1.0 - 1.0 / fp.qd(); }

/// sum_{l > n} r^l for 0 < r < 1
double geometric_tail(double r, int n) { return std::pow(r, n + 1) / (1.0 - r); }

/// sum_{l > n} l r^l for 0 < r < 1
double arithmetic_geometric_tail(double r, int n) {
  const double one_minus = 1.0 - r;
  return std::pow(r, n + 1) * ((n + 1) / one_minus + r / (one_minus * one_minus));
}

/// sum_{k <= n} k q^k
double weighted_head(const FieldParams& fp, int n) {
  const double q = fp.qd();
  return fp.pow(n + 1) * (n / (q - 1.0) - 1.0 / ((q - 1.0) * (q - 1.0)));
}

/// Adds scale * q^(exponent l), merging with an existing term of the same
/// exponent.
void add_term(std::vector<PowerTerm>& terms, cd scale, double exponent) {
  for (auto& t : terms) {
    if (std::abs(t.exponent - exponent) < kExponentMatch) {
      t.scale += scale;
      return;
    }
  }
  terms.push_back({scale, exponent});
}

/// Sum over l > n of q^(-alpha l) t(l) for the tail model t.
cd tail_upper_sum(const FieldParams& fp, const AlphaOrder& a, const TailModel& t,
                  int n) {
  const double alpha = a.value();
  const double rho = fp.pow(-alpha);
  cd acc = t.offset() * geometric_tail(rho, n) +
           t.slope() * arithmetic_geometric_tail(rho, n);
  for (const auto& term : t.terms()) {
    acc += term.scale * geometric_tail(fp.pow(term.exponent - alpha), n);
  }
  return acc;
}

void require_summable_tail(const TailModel& t, const AlphaOrder& a) {
  for (const auto& term : t.terms()) {
    if (!(term.exponent < a.value())) {
      throw DivergentTailError(
          "tail term |x|^" + std::to_string(term.exponent) +
          " is not summable against |x|^-alpha, alpha = " + std::to_string(a.value()));
    }
  }
}

}  // namespace

AlphaOrder::AlphaOrder(double alpha)
    : alpha_(alpha), log_branch_(std::abs(alpha - 1.0) < kLogBranchWidth) {
  detail::require_positive_alpha(alpha);
}

bool AlphaOrder::near_pole(const FieldParams& fp) const {
  return !log_branch_ && std::abs(1.0 - fp.pow(alpha_ - 1.0)) < 1e-6;
}

double gamma_K(const FieldParams& fp, double s) {
  if (s == 0.0) {
    throw PoleError("Gamma_K has a pole at s = 0");
  }
  const double denom = 1.0 - fp.pow(-s);
  if (denom == 0.0) throw PoleError("Gamma_K: denominator vanishes");
  return (1.0 - fp.pow(s - 1.0)) / denom;
}

double RieszConstants::c() const {
  if (!c_alpha) {
    throw LogBranchError(
        "c_alpha is undefined at alpha = 1; the logarithmic kernel applies");
  }
  return *c_alpha;
}

RieszConstants constants(const FieldParams& fp, const AlphaOrder& a) {
  const double alpha = a.value();
  RieszConstants out;
  out.d_alpha = (1.0 - fp.pow(alpha)) / (1.0 - fp.pow(-alpha - 1.0));
  if (!a.is_log_branch()) {
    out.c_alpha = (1.0 - fp.pow(-alpha)) / (1.0 - fp.pow(alpha - 1.0));
  }
  return out;
}

double diagonal_coefficient(const FieldParams& fp, const AlphaOrder& a) {
  const double alpha = a.value();
  return fp.pow(-1.0) * (fp.pow(alpha) + fp.qd() - 2.0) /
         (1.0 - fp.pow(-alpha - 1.0));
}

double lower_integral_factor(const FieldParams& fp, const AlphaOrder& a) {
  if (a.is_log_branch()) {
    return (1.0 - fp.qd()) / (fp.qd() * fp.log_q());
  }
  return constants(fp, a).c();
}

RadialFunction apply_D(const RadialFunction& u, const AlphaOrder& a) {
  const FieldParams& fp = u.field();
  const LevelGrid& grid = u.grid();
  const double alpha = a.value();
  require_summable_tail(u.tail(), a);

  const double d = constants(fp, a).d_alpha;
  const double k2 = diagonal_coefficient(fp, a);
  const double outer = d * shell_factor(fp);

  // D annihilates constants, so work with w = u - u(0): the head drops out
  // and no large multiples of u(0) have to cancel.
  const cd u0 = u.value_at_zero();
  const Eigen::VectorXcd w = u.values().array() - u0;
  const TailModel w_tail = u.tail() + TailModel::constant(-u0);

  const int size = grid.size();
  Eigen::VectorXcd out(size);

  // upper(n) = sum_{l > n} q^(-alpha l) w_l
  cd upper = tail_upper_sum(fp, a, w_tail, grid.n_max);
  for (int i = size - 1; i >= 0; --i) {
    out[i] = outer * upper;
    upper += fp.pow(-alpha * (grid.n_min + i)) * w[i];
  }

  // lower(n) = q^(-(alpha+1) n) sum_{n_min <= k < n} q^k w_k
  const double step = fp.pow(-(alpha + 1.0));
  cd lower = 0.0;
  for (int i = 0; i < size; ++i) {
    const int n = grid.n_min + i;
    const double scale = fp.pow(-alpha * n);
    out[i] += outer * lower + k2 * scale * w[i];
    lower = step * (lower + scale * w[i]);
  }

  // Continuation above the grid: D of the grid part plus D of each tail
  // component restricted to l > N. Every piece is a pure power of |x|.
  const int top = grid.n_max;
  std::vector<PowerTerm> terms;
  const double low_exponent = -(alpha + 1.0);
  cd moment = 0.0;  // sum_{k <= N} q^k w_k
  for (int i = 0; i < size; ++i) moment += fp.pow(grid.n_min + i) * w[i];
  add_term(terms, outer * moment, low_exponent);

  const cd c_tail = w_tail.offset();
  add_term(terms, -outer * c_tail * fp.pow(top + 1) / (fp.qd() - 1.0), low_exponent);

  for (const auto& term : w_tail.terms()) {
    const double beta = term.exponent;
    const double gamma = 1.0 + beta;
    if (std::abs(gamma) < kExponentMatch) {
      throw UnsupportedTailError(
          "apply_D cannot continue a tail term |x|^-1 in closed form");
    }
    const double qg = fp.pow(gamma);
    const double r = fp.pow(beta - alpha);
    const cd main = term.scale * (outer / (qg - 1.0) + k2 + outer * r / (1.0 - r));
    add_term(terms, main, beta - alpha);
    add_term(terms, -term.scale * outer * fp.pow(gamma * (top + 1)) / (qg - 1.0),
             low_exponent);
  }
  if (w_tail.slope() != cd{}) {
    const double q = fp.qd();
    const double rho = fp.pow(-alpha);
    const cd t = w_tail.slope();
    add_term(terms,
             t * outer * (-q / ((q - 1.0) * (q - 1.0)) + rho / ((1.0 - rho) * (1.0 - rho))),
             -alpha);
    add_term(terms, -t * outer * weighted_head(fp, top), low_exponent);
  }

  const cd at_lowest = out[0];
  return RadialFunction(fp, grid, std::move(out), at_lowest,
                        TailModel::power(0.0, std::move(terms)));
}

RadialFunction apply_I(const RadialFunction& u, const AlphaOrder& a) {
  const FieldParams& fp = u.field();
  const LevelGrid& grid = u.grid();
  if (u.tail().slope() != cd{}) {
    throw UnsupportedTailError("apply_I cannot continue a logarithmic input tail");
  }
  const double alpha = a.value();
  const double kernel = lower_integral_factor(fp, a);
  const double diag = diagonal_factor(fp, a);

  Eigen::VectorXcd out(grid.size());
  LowerIntegral<cd> lower(fp, a, grid.n_min, u.value_at_zero());
  for (int i = 0; i < grid.size(); ++i) {
    const int n = grid.n_min + i;
    out[i] = diag * fp.pow(alpha * n) * u.values()[i] + kernel * lower.value();
    lower.push(u.values()[i]);
  }

  // Above the grid, I u = I (u - c) with c the tail offset. The grid part of
  // u - c enters through its full moments; each tail power enters through
  // finite geometric sums from N + 1 up to the level.
  const cd c = u.tail().offset();
  const cd head = u.value_at_zero() - c;
  const double q = fp.qd();
  const double shell = shell_factor(fp);
  const int top = grid.n_max;
  const bool log = a.is_log_branch();
  cd m1 = head * fp.pow(grid.n_min) / (q - 1.0);  // sum q^k w_k
  cd m2 = log ? head * weighted_head(fp, grid.n_min - 1)  // sum k q^k w_k
              : head * fp.pow(alpha * grid.n_min) / (fp.pow(alpha) - 1.0);
  for (int i = 0; i < grid.size(); ++i) {
    const int k = grid.n_min + i;
    const cd w = u.values()[i] - c;
    m1 += fp.pow(k) * w;
    m2 += log ? static_cast<double>(k) * fp.pow(k) * w : fp.pow(alpha * k) * w;
  }

  std::vector<PowerTerm> terms;
  cd offset;
  cd slope;
  if (log) {
    // kernel * (1 - 1/q) log q * sum_k (l - k) q^k w_k
    const double f = kernel * shell * fp.log_q();
    slope = f * m1;
    offset = -f * m2;
    for (const auto& term : u.tail().terms()) {
      const double gamma = 1.0 + term.exponent;
      if (std::abs(gamma) < kExponentMatch) {
        throw UnsupportedTailError("apply_I cannot continue a tail term |x|^-1");
      }
      const double r = fp.pow(-gamma);
      const double qn = fp.pow(gamma * top);
      const cd s = term.scale;
      add_term(terms, s * (1.0 / q + f * r / ((1.0 - r) * (1.0 - r))), gamma);
      slope += -s * f * qn / (1.0 - r);
      offset += s * f * qn * (top / (1.0 - r) - r / ((1.0 - r) * (1.0 - r)));
    }
  } else {
    const double f = kernel * shell;
    offset = -f * m2;
    add_term(terms, f * m1, alpha - 1.0);
    for (const auto& term : u.tail().terms()) {
      const double beta = term.exponent;
      const double gamma = 1.0 + beta;
      if (std::abs(gamma) < kExponentMatch || std::abs(alpha + beta) < kExponentMatch) {
        throw UnsupportedTailError("apply_I cannot continue the tail term |x|^" +
                                   std::to_string(beta) + " in closed form");
      }
      const double qg = fp.pow(gamma);
      const double qab = fp.pow(alpha + beta);
      const cd s = term.scale;
      add_term(terms, s * (diag + f / (qg - 1.0) - f / (qab - 1.0)), alpha + beta);
      add_term(terms, -s * f * fp.pow(gamma * (top + 1)) / (qg - 1.0), alpha - 1.0);
      offset += s * f * fp.pow((alpha + beta) * (top + 1)) / (qab - 1.0);
    }
  }
  return RadialFunction(fp, grid, std::move(out), cd{},
                        TailModel::general(offset, slope, std::move(terms)));
}

ZeroLimit zero_limit(const RadialFunction& du) {
  const cd first = du.values()[0];
  const double drift =
      du.grid().size() > 1 ? std::abs(first - du.values()[1]) : 0.0;
  return {first, drift};
}

cd riesz_potential_at_zero(const RadialFunction& u, const AlphaOrder& a) {
  const FieldParams& fp = u.field();
  const LevelGrid& grid = u.grid();
  const TailModel& t = u.tail();
  const double alpha = a.value();
  const double shell = shell_factor(fp);
  const bool log = a.is_log_branch();

  // The potential integrates |y|^(alpha-1) (or log|y|) over the whole field;
  // every tail component must decay fast enough.
  const bool divergent =
      t.offset() != cd{} || t.slope() != cd{} ||
      std::any_of(t.terms().begin(), t.terms().end(), [&](const PowerTerm& p) {
        return !(p.exponent < (log ? -1.0 : -alpha));
      });
  if (divergent) {
    throw DivergentTailError(
        "riesz_potential_at_zero: the integral over the whole field diverges for "
        "this tail");
  }

  const cd u0 = u.value_at_zero();
  cd sum;
  if (log) {
    sum = u0 * weighted_head(fp, grid.n_min - 1);
    for (int i = 0; i < grid.size(); ++i) {
      const int k = grid.n_min + i;
      sum += static_cast<double>(k) * fp.pow(k) * u.values()[i];
    }
    for (const auto& p : t.terms()) {
      sum += p.scale * arithmetic_geometric_tail(fp.pow(1.0 + p.exponent), grid.n_max);
    }
    return lower_integral_factor(fp, a) * shell * fp.log_q() * sum;
  }
  sum = u0 * fp.pow(alpha * grid.n_min) / (fp.pow(alpha) - 1.0);
  for (int i = 0; i < grid.size(); ++i) {
    sum += fp.pow(alpha * (grid.n_min + i)) * u.values()[i];
  }
  for (const auto& p : t.terms()) {
    sum += p.scale * geometric_tail(fp.pow(alpha + p.exponent), grid.n_max);
  }
  return constants(fp, a).c() * shell * sum;
}

double moment_coefficient(const FieldParams& fp, const AlphaOrder& a, int m) {
  if (m < 0) throw ValidationError("moment index m must be >= 0");
  const double q = fp.qd();
  if (a.is_log_branch()) {
    const double r = fp.pow(-m - 1.0);
    return (1.0 - 1.0 / q) * fp.log_q() * r / ((1.0 - r) * (1.0 - r));
  }
  const double alpha = a.value();
  const double d = (1.0 - fp.pow(-1.0)) * (fp.pow(alpha - 1.0) - 1.0) /
                   ((1.0 - fp.pow(-alpha * m - 1.0)) * (fp.pow(alpha * m + alpha) - 1.0));
  return std::abs(d);
}

double moment_integral_closed(const FieldParams& fp, const AlphaOrder& a, int m,
                              int n) {
  const double alpha = a.is_log_branch() ? 1.0 : a.value();
  return moment_coefficient(fp, a, m) * fp.pow(alpha * n * (m + 1.0));
}

InverseIdentityReport verify_inverse_identity(const RadialFunction& v,
                                              const AlphaOrder& a, int margin) {
  InverseIdentityReport report;
  report.margin = margin;
  if (!v.tail().vanishes()) {
    report.precondition_ok = false;
    report.note =
        "precondition violated: v must vanish above its grid (zero tail); "
        "I^alpha annihilates constants, so D^alpha I^alpha cannot reproduce them";
  }
  const RadialFunction round_trip = apply_D(apply_I(v, a), a);
  const LevelGrid& grid = v.grid();
  report.deviation.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double dev = std::abs(round_trip.values()[i] - v.values()[i]);
    report.deviation[i] = dev;
    report.max_deviation = std::max(report.max_deviation, dev);
    if (i >= margin && i < grid.size() - margin) {
      report.max_interior_deviation = std::max(report.max_interior_deviation, dev);
    }
  }
  if (report.precondition_ok && report.note.empty()) report.note = "ok";
  return report;
}

}  // namespace radfrac
