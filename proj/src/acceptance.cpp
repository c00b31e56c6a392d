#include "radfrac/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "radfrac/oracles.hpp"

namespace radfrac::acceptance {

namespace {

constexpr std::uint64_t kSeed = 20240611;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

cd random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

double rel_err(double got, double want) {
  return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

Result integration_closed_forms() {
  double worst_power = 0.0;  // relative
  double worst_log = 0.0;    // absolute / (q^n log q max(1, |n|))
  double worst_measure = 0.0;
  for (int q : {2, 3, 5, 7}) {
    const FieldParams fp(q);
    for (int n = -8; n <= 8; ++n) {
      const double ball = oracle_radial_sum_to<double>(fp, [](int) { return 1.0; }, n);
      const double below = oracle_radial_sum_to<double>(fp, [](int) { return 1.0; }, n - 1);
      const double sphere = ball - below;
      const double fixed = sphere / (q - 1);
      worst_measure = std::max({worst_measure, rel_err(ball_volume(fp, n), ball),
                                rel_err(sphere_volume(fp, n), sphere),
                                rel_err(sector_volume_fixed_digit(fp, n), fixed)});
      // Excluded digit vanishes for q = 2; compare on the scale of the sphere.
      worst_measure =
          std::max(worst_measure,
                   std::abs(sector_volume_excluded_digit(fp, n) - (sphere - fixed)) / sphere);

      const double scale = fp.pow(n) * fp.log_q() * std::max(1, std::abs(n));
      worst_log = std::max(
          {worst_log, std::abs(ball_integral_log(fp, n) - oracle::ball_integral_log(fp, n)) / scale,
           std::abs(sphere_integral_shifted_log(fp, n) -
                    oracle::sphere_integral_shifted_log(fp, n)) /
               scale});
      for (double alpha : {0.3, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        worst_power = std::max(
            {worst_power,
             rel_err(ball_integral_power(fp, alpha, n), oracle::ball_integral_power(fp, alpha, n)),
             rel_err(sphere_integral_shifted_power(fp, alpha, n),
                     oracle::sphere_integral_shifted_power(fp, alpha, n))});
      }
    }
  }
  const double worst = std::max({worst_power, worst_log, worst_measure});
  return {1, "", worst <= 1e-10,
          "power rel " + sci(worst_power) + ", log scaled " + sci(worst_log) + ", measures rel " +
              sci(worst_measure) + " (tol 1e-10)"};
}

Result example_identity() {
  double worst = 0.0;
  for (int q : {2, 3, 5}) {
    const FieldParams fp(q);
    for (double alpha : {0.5, 1.0, 2.0}) {
      const RadialFunction one = constant_function(fp, LevelGrid(-59, 0), 1.0);
      const RadialFunction out = apply_I(one, AlphaOrder(alpha));
      worst = std::max({worst, out.values().cwiseAbs().maxCoeff(), std::abs(out.value_at_zero())});
    }
  }
  return {2, "", worst <= 1e-12, "max |I 1| over 60 levels " + sci(worst) + " (tol 1e-12)"};
}

Result inverse_identity() {
  std::mt19937_64 rng(kSeed + 3);
  const int qs[] = {2, 3, 5};
  const double alphas[] = {0.5, 1.0, 2.0, 0.7, 1.5};
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const FieldParams fp(qs[t % 3]);
    const AlphaOrder a(alphas[t % 5]);
    const int reach = static_cast<int>(std::ceil(40.0 / a.value()));
    const int first = -2;
    const int support = 5;
    const RadialFunction v =
        random_bump(rng, fp, first, support, first - reach, first + support - 1 + reach);
    const InverseIdentityReport r = verify_inverse_identity(v, a, residual_margin(a));
    if (!r.precondition_ok) return {3, "", false, r.note};
    worst = std::max(worst, r.max_interior_deviation);
  }
  return {3, "", worst <= 1e-8,
          "10 random bumps, max interior |D I v - v| " + sci(worst) + " (tol 1e-8)"};
}

Result moment_closed_forms() {
  double worst = 0.0;
  bool bound_ok = true;
  double worst_bound_ratio = 0.0;
  for (int q : {2, 3}) {
    const FieldParams fp(q);
    for (double alpha : {0.5, 1.0, 2.0}) {
      const AlphaOrder a(alpha);
      const double A = moment_coefficient(fp, a, 0);
      for (int m = 0; m <= 20; ++m) {
        for (int n : {-2, 0, 3}) {
          worst = std::max(worst, rel_err(moment_integral_closed(fp, a, m, n),
                                          oracle::moment_integral(fp, a, m, n)));
        }
        const double ratio = moment_coefficient(fp, a, m) / (A * fp.pow(-alpha * m));
        worst_bound_ratio = std::max(worst_bound_ratio, ratio);
        if (ratio > 1.0 + 1e-12) bound_ok = false;
      }
    }
  }
  return {4, "", worst <= 1e-10 && bound_ok,
          "max rel err " + sci(worst) + " (tol 1e-10), max d_m / (A q^(-alpha m)) " +
              sci(worst_bound_ratio) + " (must be <= 1)"};
}

struct PicardRuns {
  std::vector<CauchyProblem> problems;
  std::vector<SolveReport> direct;
  std::vector<SolveReport> picard;
};

const PicardRuns& picard_runs() {
  static const PicardRuns runs = [] {
    PicardRuns r;
    std::mt19937_64 rng(kSeed + 5);
    const int qs[] = {2, 3};
    const double alphas[] = {0.5, 1.0, 2.0};
    for (int t = 0; t < 10; ++t) {
      r.problems.push_back(
          random_decaying_problem(rng, qs[t % 2], alphas[t % 3], LevelGrid(-50, 50)));
      r.direct.push_back(solve_direct(r.problems.back()));
      r.picard.push_back(solve_picard(r.problems.back()));
    }
    return r;
  }();
  return runs;
}

Result solver_cross_validation() {
  const PicardRuns& runs = picard_runs();
  double agree = 0.0;
  double res = 0.0;
  int decay_failures = 0;
  for (std::size_t t = 0; t < runs.problems.size(); ++t) {
    agree = std::max(
        agree, (runs.direct[t].v.values() - runs.picard[t].v.values()).cwiseAbs().maxCoeff());
    res = std::max(res, runs.direct[t].residual_max);
    if (!check_decay_hypothesis(runs.problems[t], 0.25).satisfied) ++decay_failures;
  }
  return {5, "", agree <= 1e-10 && res <= 1e-8 && decay_failures == 0,
          "direct vs Picard " + sci(agree) + " (tol 1e-10), residual " + sci(res) +
              " (tol 1e-8), decay check failures " + std::to_string(decay_failures)};
}

/// Smallest m0 in [0, 3] with d(m+1)/d(m) <= q^(-alpha (m - m0)) for every
/// m > m0 whose d(m) is above the rounding floor; -1 when none fits.
int fit_offset(const std::vector<double>& d, double q, double alpha, double floor) {
  for (int m0 = 0; m0 <= 3; ++m0) {
    bool ok = true;
    for (std::size_t m = m0 + 1; m + 1 < d.size(); ++m) {
      if (d[m] <= floor) break;
      if (d[m + 1] / d[m] > std::pow(q, -alpha * (static_cast<double>(m) - m0))) ok = false;
    }
    if (ok) return m0;
  }
  return -1;
}

Result picard_decay_shape() {
  const PicardRuns& runs = picard_runs();
  std::vector<const SolveReport*> reports;
  std::vector<std::pair<int, double>> params;
  for (std::size_t t = 0; t < runs.problems.size(); ++t) {
    reports.push_back(&runs.picard[t]);
    params.emplace_back(runs.problems[t].fp.q(), runs.problems[t].order.value());
  }
  std::mt19937_64 rng(kSeed + 6);
  const SolveReport extra = solve_picard(random_decaying_problem(rng, 2, 2.0, LevelGrid(-50, 50)));
  reports.push_back(&extra);
  params.emplace_back(2, 2.0);

  int worst_m0 = 0;
  int longest = 0;
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const double floor = 1e-13 * std::max(1.0, reports[t]->v.values().cwiseAbs().maxCoeff());
    const int m0 = fit_offset(reports[t]->iterate_diffs, params[t].first, params[t].second, floor);
    if (m0 < 0) {
      return {6, "", false, "run " + std::to_string(t) + ": no offset m0 <= 3 fits"};
    }
    worst_m0 = std::max(worst_m0, m0);
    longest = std::max(longest, reports[t]->iterations);
  }
  return {6, "", true,
          std::to_string(reports.size()) + " runs, largest fitted m0 = " +
              std::to_string(worst_m0) + ", at most " + std::to_string(longest) + " iterations"};
}

Result volterra_causality() {
  std::mt19937_64 rng(kSeed + 7);
  int broken = 0;
  int checks = 0;
  for (int t = 0; t < 4; ++t) {
    const CauchyProblem p = random_decaying_problem(rng, 2 + t % 2, t % 2 ? 0.5 : 2.0,
                                                    LevelGrid(-30, 30));
    const SolveReport base = solve_direct(p);
    for (int cut : {-20, 0, 17}) {
      Eigen::VectorXcd f = p.f.values();
      for (int n = cut + 1; n <= p.f.grid().n_max; ++n) {
        f[p.f.grid().index(n)] += random_complex(rng);
      }
      CauchyProblem perturbed = p;
      perturbed.f = RadialFunction(p.fp, p.f.grid(), f, p.f.value_at_zero(), p.f.tail());
      const SolveReport out = solve_direct(perturbed);
      for (int n = p.f.grid().n_min; n <= cut; ++n) {
        ++checks;
        if (out.v.at(n) != base.v.at(n)) ++broken;
      }
    }
  }
  return {7, "", broken == 0,
          std::to_string(broken) + " of " + std::to_string(checks) +
              " levels below the perturbation changed (must be 0, bitwise)"};
}

Result spectral_condition() {
  const FieldParams fp(2);
  const AlphaOrder a(1.0);
  const LevelGrid grid(-10, 10);
  const CauchyProblem singular{fp, a, constant_function(fp, grid, -2.0),
                               constant_function(fp, grid, 1.0), 0.0};
  std::string rejected = "not rejected";
  bool reject_ok = false;
  try {
    solve_direct(singular);
  } catch (const SingularPivotError& e) {
    reject_ok = e.level() == 0;
    rejected = "SingularPivot at level " + std::to_string(e.level());
  }

  std::mt19937_64 rng(kSeed + 8);
  const CauchyProblem p = random_decaying_problem(rng, 3, 0.5, LevelGrid(-40, 40));
  const SolveReport scalar = solve_direct(p);
  std::vector<Eigen::MatrixXcd> levels;
  for (int i = 0; i < p.a.grid().size(); ++i) {
    levels.push_back(Eigen::MatrixXcd::Constant(1, 1, p.a.values()[i]));
  }
  const MatrixCauchyProblem mp{
      p.fp, p.order,
      MatrixRadialFunction(p.fp, p.a.grid(), 1, levels,
                           Eigen::MatrixXcd::Constant(1, 1, p.a.value_at_zero()),
                           MatrixTail::zero()),
      {p.f}, Eigen::VectorXcd::Constant(1, p.u0)};
  const MatrixSolveReport matrix = solve_matrix(mp);
  double diff = 0.0;
  for (int n = p.a.grid().n_min; n <= p.a.grid().n_max; ++n) {
    const cd su = scalar.u.at(n);
    diff = std::max({diff, std::abs(scalar.v.at(n) - matrix.v[0].at(n)) /
                               std::max(1.0, std::abs(scalar.v.at(n))),
                     std::abs(su - matrix.u[0].at(n)) / std::max(1.0, std::abs(su))});
  }
  diff = std::max(diff, std::abs(scalar.min_pivot - matrix.min_pivot));
  return {8, "", reject_ok && diff <= 1e-12,
          rejected + "; d=1 matrix vs scalar " + sci(diff) + " (tol 1e-12)"};
}

Result non_strong_flag() {
  const FieldParams fp(2);
  const AlphaOrder a(2.0);
  const LevelGrid grid(-40, 0);
  const CauchyProblem p{fp, a, constant_function(fp, grid, 0.0), constant_function(fp, grid, 1.0),
                        0.0};
  const SolveReport r = solve_direct(p);
  const double u_max = std::max(r.u.values().cwiseAbs().maxCoeff(), std::abs(r.u.value_at_zero()));
  const bool flagged = std::find(r.warnings.begin(), r.warnings.end(),
                                 std::string(kNonDecayingWarning)) != r.warnings.end();
  const bool tail_zero = r.u.tail().vanishes();
  const bool ok = u_max <= 1e-12 && tail_zero && std::abs(r.residual_max - 1.0) <= 1e-12 && flagged;
  return {9, "", ok,
          "max |u| " + sci(u_max) + (tail_zero ? ", tail zero" : ", tail nonzero") +
              ", residual_max " + sci(r.residual_max) + (flagged ? ", flagged" : ", NOT flagged")};
}

Result dilation_covariance() {
  std::mt19937_64 rng(kSeed + 10);
  const FieldParams fp(3);
  double worst = 0.0;
  for (double alpha : {0.5, 2.0}) {
    const AlphaOrder a(alpha);
    Eigen::VectorXcd values(41);
    for (int i = 0; i < values.size(); ++i) values[i] = random_complex(rng);
    const RadialFunction u(fp, LevelGrid(-20, 20), values, random_complex(rng), TailModel::zero());
    const RadialFunction du = apply_D(u, a);
    const RadialFunction iu = apply_I(u, a);
    for (int j : {-3, 2}) {
      const RadialFunction shifted = shift_levels(u, j);
      const RadialFunction dus = apply_D(shifted, a);
      const RadialFunction ius = apply_I(shifted, a);
      for (int n = shifted.grid().n_min; n <= shifted.grid().n_max + 5; ++n) {
        const cd want_d = fp.pow(alpha * j) * du.at(n + j);
        const cd want_i = fp.pow(-alpha * j) * iu.at(n + j);
        worst = std::max({worst, std::abs(dus.at(n) - want_d) / std::abs(want_d),
                          std::abs(ius.at(n) - want_i) / std::abs(want_i)});
      }
    }
  }
  return {10, "", worst <= 1e-12, "max per-level relative error " + sci(worst) + " (tol 1e-12)"};
}

}  // namespace

CauchyProblem random_decaying_problem(std::mt19937_64& rng, int q, double alpha,
                                      const LevelGrid& grid) {
  const FieldParams fp(q);
  const AlphaOrder order(alpha);
  std::uniform_real_distribution<double> amp(0.1, 0.6);
  for (;;) {
    const cd a0 = amp(rng) * random_complex(rng);
    const cd f0 = random_complex(rng);
    const double a_amp = amp(rng);
    Eigen::VectorXcd a(grid.size());
    Eigen::VectorXcd f(grid.size());
    for (int n = grid.n_min; n <= grid.n_max; ++n) {
      const Eigen::Index i = grid.index(n);
      if (n <= 0) {
        // Continuous at zero: deviations shrink like |x|.
        a[i] = a0 + a_amp * fp.pow(n) * random_complex(rng);
        f[i] = f0 + fp.pow(n) * random_complex(rng);
      } else {
        a[i] = a_amp * fp.pow(-n * (alpha + 0.5)) * random_complex(rng);
        f[i] = fp.pow(-n * 0.5) * random_complex(rng);
      }
    }
    CauchyProblem p{fp, order, RadialFunction(fp, grid, a, a0, TailModel::zero()),
                    RadialFunction(fp, grid, f, f0, TailModel::zero()),
                    0.5 * random_complex(rng)};
    if (check_spectral_condition(p).min_pivot >= 0.1) return p;
  }
}

RadialFunction random_bump(std::mt19937_64& rng, const FieldParams& fp, int first, int support,
                           int lo, int hi) {
  const LevelGrid grid(lo, hi);
  Eigen::VectorXcd values = Eigen::VectorXcd::Zero(grid.size());
  for (int n = first; n < first + support; ++n) values[grid.index(n)] = random_complex(rng);
  return RadialFunction(fp, grid, std::move(values), cd{}, TailModel::zero());
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "integration closed forms", integration_closed_forms},
      {2, "I^alpha annihilates constants", example_identity},
      {3, "inverse identity D I v = v", inverse_identity},
      {4, "moment integral closed forms", moment_closed_forms},
      {5, "direct vs Picard, end-to-end residual", solver_cross_validation},
      {6, "Picard superexponential decay", picard_decay_shape},
      {7, "Volterra causality", volterra_causality},
      {8, "spectral condition", spectral_condition},
      {9, "non-decaying data flag", non_strong_flag},
      {10, "dilation covariance", dilation_covariance},
  };
  return all;
}

std::vector<Result> run_all() {
  std::vector<Result> out;
  for (const auto& c : criteria()) {
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {c.id, "", false, std::string("threw: ") + e.what()};
    }
    r.id = c.id;
    r.name = c.name;
    out.push_back(std::move(r));
  }
  return out;
}

std::string format(const Result& r) {
  char head[80];
  std::snprintf(head, sizeof head, "%s %2d  %-40s ", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str());
  return head + r.detail;
}

}  // namespace radfrac::acceptance
