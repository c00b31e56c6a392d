#pragma once

// The acceptance suite: one self-contained check per criterion, each a pure
// computation with fixed seeds. Used by the acceptance test binary and by
// `radfrac verify`.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "radfrac/cauchy.hpp"

namespace radfrac::acceptance {

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Result()> run;
};

const std::vector<Criterion>& criteria();

/// Runs every criterion in order.
std::vector<Result> run_all();

/// "PASS  3  inverse identity  max interior deviation 1.1e-16"
std::string format(const Result& r);

/// Random coefficient and right-hand side with |a(q^n)| <= q^(-n(alpha+1/2))
/// and |f(q^n)| <= q^(-n/2) on positive levels, continuous at zero, tails
/// Zero, re and im of u0 uniform in [-0.5, 0.5]. Regenerated until every pivot is at
/// least 0.1.
CauchyProblem random_decaying_problem(std::mt19937_64& rng, int q, double alpha,
                                      const LevelGrid& grid);

/// v supported on `support` consecutive levels starting at `first`, zero
/// elsewhere, stored on [lo, hi].
RadialFunction random_bump(std::mt19937_64& rng, const FieldParams& fp, int first,
                           int support, int lo, int hi);

}  // namespace radfrac::acceptance
