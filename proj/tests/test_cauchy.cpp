#include <doctest.h>

#include <cmath>
#include <random>

#include "radfrac/acceptance.hpp"
#include "radfrac/cauchy.hpp"

using namespace radfrac;

namespace {

double sup_diff(const RadialFunction& a, const RadialFunction& b) {
  double worst = 0.0;
  for (int n = a.grid().n_min; n <= a.grid().n_max; ++n) {
    worst = std::max(worst, std::abs(a.at(n) - b.at(n)));
  }
  return worst;
}

CauchyProblem problem(int q, double alpha, RadialFunction a, RadialFunction f, cd u0 = {}) {
  return {FieldParams(q), AlphaOrder(alpha), std::move(a), std::move(f), u0};
}

bool has_warning(const std::vector<std::string>& warnings, const std::string& text) {
  for (const auto& w : warnings) {
    if (w.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("spectral condition") {
  const FieldParams fp(2);
  const LevelGrid g(-5, 5);
  const RadialFunction zero = constant_function(fp, g, 0.0);
  const SpectralReport ok = check_spectral_condition(problem(2, 1.0, zero, zero));
  CHECK(ok.ok);
  CHECK(ok.min_pivot == 1.0);

  const RadialFunction minus_two = constant_function(fp, g, -2.0);
  const SpectralReport bad = check_spectral_condition(problem(2, 1.0, minus_two, zero));
  CHECK_FALSE(bad.ok);
  CHECK(bad.min_pivot == 0.0);
  CHECK(bad.min_pivot_level == 0);
  CHECK(bad.offending_levels == std::vector<int>{0});

  // The head levels use a(0): a singular pivot below the grid is found too.
  const RadialFunction a_head =
      make_radial(fp, LevelGrid(2, 3), Eigen::VectorXcd::Zero(2), -2.0, TailModel::zero());
  const SpectralReport head = check_spectral_condition(
      problem(2, 1.0, a_head, make_radial(fp, LevelGrid(2, 3), Eigen::VectorXcd::Zero(2), 0.0,
                                          TailModel::zero())));
  CHECK_FALSE(head.ok);
  CHECK(head.min_pivot_level == 0);

  std::mt19937_64 rng(41);
  const CauchyProblem p = acceptance::random_decaying_problem(rng, 3, 0.5, g);
  const MatrixCauchyProblem m{p.fp, p.order, as_matrix(p.a), {p.f}, {}};
  CHECK(check_spectral_condition(m).min_pivot == doctest::Approx(check_spectral_condition(p).min_pivot));
}

TEST_CASE("zero coefficient gives v = f") {
  std::mt19937_64 rng(43);
  const FieldParams fp(3);
  const RadialFunction f = acceptance::random_bump(rng, fp, -3, 5, -10, 10);
  const RadialFunction a = constant_function(fp, f.grid(), 0.0);
  const CauchyProblem p = problem(3, 0.5, a, f);
  const SolveReport r = solve_direct(p);
  CHECK(r.v == f);
  CHECK(sup_diff(r.u, apply_I(f, p.order)) == 0.0);

  const SolveReport pic = solve_picard(p);
  CHECK(pic.iterations <= 1);
  CHECK(pic.v == f);
}

TEST_CASE("zero data gives the zero solution") {
  const FieldParams fp(2);
  std::mt19937_64 rng(47);
  const RadialFunction a = acceptance::random_bump(rng, fp, -2, 3, -8, 8);
  const RadialFunction zero = constant_function(fp, a.grid(), 0.0);
  const SolveReport r = solve_direct(problem(2, 2.0, a, zero));
  CHECK(r.v.values().cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.u.values().cwiseAbs().maxCoeff() == 0.0);
  CHECK(residual(problem(2, 2.0, a, zero), zero).residual_max == 0.0);
}

TEST_CASE("value at zero") {
  std::mt19937_64 rng(53);
  const CauchyProblem base = acceptance::random_decaying_problem(rng, 2, 2.0, LevelGrid(-40, 20));
  CauchyProblem p = base;
  p.u0 = cd(0.5, -0.25);
  const SolveReport r = solve_direct(p);
  CHECK(r.v.value_at_zero() == p.f.value_at_zero() - p.a.value_at_zero() * p.u0);
  CHECK(r.u.value_at_zero() == p.u0);
}

TEST_CASE("direct and Picard agree") {
  std::mt19937_64 rng(59);
  for (auto [q, alpha] : {std::pair{3, 0.5}, {2, 2.0}, {2, 1.0}, {5, 1.5}}) {
    const CauchyProblem p = acceptance::random_decaying_problem(rng, q, alpha, LevelGrid(-30, 30));
    const SolveReport d = solve_direct(p);
    const SolveReport pic = solve_picard(p);
    CAPTURE(q);
    CAPTURE(alpha);
    CHECK(sup_diff(d.v, pic.v) <= 1e-10);
  }
}

TEST_CASE("Picard differences decay superexponentially") {
  std::mt19937_64 rng(61);
  const CauchyProblem p = acceptance::random_decaying_problem(rng, 2, 2.0, LevelGrid(-30, 30));
  const SolveReport r = solve_picard(p);
  const auto& d = r.iterate_diffs;
  REQUIRE(d.size() >= 3);
  // Ratios d[m+1]/d[m] <= C q^(-alpha m) once both are above rounding.
  double c = 0.0;
  for (std::size_t m = 1; m + 1 < d.size(); ++m) {
    if (d[m] <= 1e-13 || d[m + 1] == 0.0) continue;
    c = std::max(c, d[m + 1] / d[m] * p.fp.pow(2.0 * m));
  }
  CHECK(c < 1e3);
}

TEST_CASE("causality") {
  std::mt19937_64 rng(67);
  const CauchyProblem p = acceptance::random_decaying_problem(rng, 3, 0.5, LevelGrid(-20, 20));
  const SolveReport base = solve_direct(p);
  const int cut = 3;
  CauchyProblem q = p;
  Eigen::VectorXcd fv = p.f.values();
  Eigen::VectorXcd av = p.a.values();
  for (int n = cut + 1; n <= 20; ++n) {
    fv[p.f.grid().index(n)] += 1.0;
    av[p.a.grid().index(n)] *= 0.5;
  }
  q.f = make_radial(p.fp, p.f.grid(), fv, p.f.value_at_zero(), p.f.tail());
  q.a = make_radial(p.fp, p.a.grid(), av, p.a.value_at_zero(), p.a.tail());
  const SolveReport changed = solve_direct(q);
  for (int n = -20; n <= cut; ++n) CHECK(changed.v.at(n) == base.v.at(n));
}

TEST_CASE("linearity in f") {
  std::mt19937_64 rng(71);
  CauchyProblem p = acceptance::random_decaying_problem(rng, 2, 1.5, LevelGrid(-25, 25));
  p.u0 = 0.0;
  const RadialFunction f2 = acceptance::random_bump(rng, p.fp, -5, 10, -25, 25);
  CauchyProblem p2 = p;
  p2.f = f2;
  CauchyProblem sum = p;
  sum.f = p.f + f2;
  const SolveReport a = solve_direct(p);
  const SolveReport b = solve_direct(p2);
  const SolveReport s = solve_direct(sum);
  CHECK(sup_diff(s.v, a.v + b.v) < 1e-13);
  // u grows like |x|^alpha above the unit ball.
  CHECK(sup_diff(s.u, a.u + b.u) < 1e-13 * s.u.values().cwiseAbs().maxCoeff());
}

TEST_CASE("strong solution residual") {
  std::mt19937_64 rng(73);
  for (auto [q, alpha] : {std::pair{2, 2.0}, {3, 0.5}, {2, 1.0}}) {
    const int margin = static_cast<int>(std::ceil(20.0 / alpha));
    const CauchyProblem p =
        acceptance::random_decaying_problem(rng, q, alpha, LevelGrid(-margin - 15, margin + 15));
    CHECK(check_decay_hypothesis(p, 0.25).satisfied);
    const SolveReport r = solve_direct(p);
    CAPTURE(q);
    CAPTURE(alpha);
    CHECK(r.residual_max <= 1e-8);
    CHECK_FALSE(has_warning(r.warnings, "non-decaying"));
  }
}

TEST_CASE("non-decaying data is flagged") {
  const FieldParams fp(2);
  const LevelGrid g(-40, 0);
  const RadialFunction zero = constant_function(fp, g, 0.0);
  const RadialFunction one = constant_function(fp, g, 1.0);
  const CauchyProblem p = problem(2, 2.0, zero, one);
  const SolveReport r = solve_direct(p);
  CHECK(sup_diff(r.v, one) == 0.0);
  CHECK(r.u.values().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.residual_max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(has_warning(r.warnings, kNonDecayingWarning));
}

TEST_CASE("decay hypothesis") {
  const FieldParams fp(2);
  const LevelGrid g(-10, 20);
  const RadialFunction zero = constant_function(fp, g, 0.0);
  const DecayReport z = check_decay_hypothesis(problem(2, 1.0, zero, zero), 0.5);
  CHECK(z.satisfied);
  CHECK(z.c_a == 0.0);
  CHECK(z.c_f == 0.0);

  Eigen::VectorXcd fv(g.size());
  for (int n = g.n_min; n <= g.n_max; ++n) fv[g.index(n)] = n >= 0 ? fp.pow(-n) : 1.0;
  const RadialFunction f = make_radial(fp, g, fv, 1.0, TailModel::power(0.0, {{1.0, -1.0}}));
  CHECK(check_decay_hypothesis(problem(2, 1.0, zero, f), 0.5).satisfied);

  const RadialFunction one = constant_function(fp, g, 1.0);
  for (double eps : {1e-3, 0.1, 0.5}) {
    const DecayReport r = check_decay_hypothesis(problem(2, 1.0, zero, one), eps);
    CHECK_FALSE(r.satisfied);
    CHECK_FALSE(r.f_ok);
  }
}

TEST_CASE("boundedness of v") {
  std::mt19937_64 rng(79);
  const CauchyProblem p = acceptance::random_decaying_problem(rng, 2, 2.0, LevelGrid(-20, 40));
  const SolveReport r = solve_direct(p);
  // Running sup over levels m <= n stops growing well inside the grid.
  double running = 0.0;
  std::vector<double> sup;
  for (int n = -20; n <= 40; ++n) {
    running = std::max(running, std::abs(r.v.at(n)));
    sup.push_back(running);
  }
  CHECK(sup.back() == sup[sup.size() - 15]);
}

TEST_CASE("matrix solver") {
  std::mt19937_64 rng(83);
  const LevelGrid g(-20, 20);
  const CauchyProblem p = acceptance::random_decaying_problem(rng, 3, 0.5, g);
  const SolveReport scalar = solve_direct(p);
  const MatrixCauchyProblem one{p.fp, p.order, as_matrix(p.a), {p.f},
                                Eigen::VectorXcd::Constant(1, p.u0)};
  const MatrixSolveReport m = solve_matrix(one);
  for (int n = g.n_min; n <= g.n_max; ++n) {
    CHECK(std::abs(m.v[0].at(n) - scalar.v.at(n)) <= 1e-12 * std::max(1.0, std::abs(scalar.v.at(n))));
  }

  // Diagonal coefficient decouples into independent scalar problems.
  const CauchyProblem p2 = acceptance::random_decaying_problem(rng, 3, 0.5, g);
  std::vector<Eigen::MatrixXcd> levels;
  for (int n = g.n_min; n <= g.n_max; ++n) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = p.a.at(n);
    d(1, 1) = p2.a.at(n);
    levels.push_back(d);
  }
  Eigen::MatrixXcd d0 = Eigen::MatrixXcd::Zero(2, 2);
  d0(0, 0) = p.a.value_at_zero();
  d0(1, 1) = p2.a.value_at_zero();
  Eigen::VectorXcd u0(2);
  u0 << cd(0.25, 0.0), cd(0.0, -1.0);
  const MatrixCauchyProblem diag{p.fp, p.order,
                                 MatrixRadialFunction(p.fp, g, 2, levels, d0, MatrixTail::zero()),
                                 {p.f, p2.f}, u0};
  const MatrixSolveReport md = solve_matrix(diag);
  CauchyProblem s0 = p, s1 = p2;
  s0.u0 = u0[0];
  s1.u0 = u0[1];
  const SolveReport r0 = solve_direct(s0);
  const SolveReport r1 = solve_direct(s1);
  for (int n = g.n_min; n <= g.n_max; ++n) {
    CHECK(std::abs(md.v[0].at(n) - r0.v.at(n)) <= 1e-12 * std::max(1.0, std::abs(r0.v.at(n))));
    CHECK(std::abs(md.v[1].at(n) - r1.v.at(n)) <= 1e-12 * std::max(1.0, std::abs(r1.v.at(n))));
    CHECK(std::abs(md.u[1].at(n) - r1.u.at(n)) <= 1e-12 * std::max(1.0, std::abs(r1.u.at(n))));
  }
  CHECK(residual_max(diag, md.u) <= 1e-8);

  // Eigenvalue -q^(alpha (1 - n0)) at n0 = 2 zeroes the pivot on that level.
  const FieldParams fp(2);
  const AlphaOrder alpha(1.0);
  const LevelGrid h(0, 4);
  std::vector<Eigen::MatrixXcd> sing(h.size(), Eigen::MatrixXcd::Zero(2, 2));
  Eigen::MatrixXcd s(2, 2);
  s << -fp.pow(-1.0), 1.0, 0.0, 0.5;
  sing[h.index(2)] = s;
  const RadialFunction zero = constant_function(fp, h, 0.0);
  const MatrixCauchyProblem bad{fp, alpha,
                                MatrixRadialFunction(fp, h, 2, sing, Eigen::MatrixXcd::Zero(2, 2),
                                                     MatrixTail::zero()),
                                {zero, zero}, {}};
  try {
    solve_matrix(bad);
    FAIL("expected a singular pivot");
  } catch (const SingularPivotError& e) {
    CHECK(e.level() == 2);
  }
}

TEST_CASE("singular scalar pivot") {
  const FieldParams fp(2);
  const LevelGrid g(-3, 3);
  const CauchyProblem p =
      problem(2, 1.0, constant_function(fp, g, -2.0), constant_function(fp, g, 0.0));
  try {
    solve_direct(p);
    FAIL("expected a singular pivot");
  } catch (const SingularPivotError& e) {
    CHECK(e.level() == 0);
  }
  CHECK_THROWS_AS(solve_picard(p), SingularPivotError);
}
