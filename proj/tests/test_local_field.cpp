#include <doctest.h>

#include <cmath>

#include "radfrac/local_field.hpp"
#include "radfrac/oracles.hpp"

using namespace radfrac;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

double rel(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("field parameters") {
  CHECK_THROWS_AS(FieldParams(1), ValidationError);
  CHECK_THROWS_AS(FieldParams(-3), ValidationError);
  CHECK(FieldParams(6).q() == 6);  // primality is never required
}

TEST_CASE("volumes") {
  const FieldParams q2(2), q3(3), q5(5);
  CHECK(ball_volume(q2, 0) == 1.0);
  CHECK(ball_volume(q3, 2) == 9.0);
  CHECK(ball_volume(q5, -1) == doctest::Approx(0.2).epsilon(1e-15));

  CHECK(sphere_volume(q2, 0) == 0.5);
  CHECK(sphere_volume(q3, 2) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(sphere_volume(q2, 0) == ball_volume(q2, 0) - ball_volume(q2, -1));

  CHECK(sector_volume_fixed_digit(q5, 0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(sector_volume_fixed_digit(q2, 3) == 4.0);
  CHECK(2.0 * sector_volume_fixed_digit(q3, 1) == doctest::Approx(sphere_volume(q3, 1)));

  CHECK(sector_volume_excluded_digit(q2, 0) == 0.0);
  CHECK(sector_volume_excluded_digit(q3, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(sector_volume_excluded_digit(q5, 1) ==
        doctest::Approx(sphere_volume(q5, 1) - sector_volume_fixed_digit(q5, 1)));
}

TEST_CASE("ball difference is a sphere") {
  for (int q : {2, 3, 5, 7}) {
    const FieldParams fp(q);
    for (int n = -10; n <= 10; ++n) {
      CHECK(rel(ball_volume(fp, n) - ball_volume(fp, n - 1), sphere_volume(fp, n)) < 1e-14);
    }
  }
}

TEST_CASE("power and log integrals") {
  const FieldParams q2(2), q3(3);
  CHECK(ball_integral_power(q2, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ball_integral_power(q3, 2.0, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(ball_integral_power(q2, 2.0, 1) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));

  CHECK(sphere_integral_shifted_power(q2, 1.0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sphere_integral_shifted_power(q3, 2.0, 0) == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
  CHECK(sphere_integral_shifted_power(q2, 2.0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  CHECK(ball_integral_log(q2, 0) == doctest::Approx(-kLog2).epsilon(1e-15));
  CHECK(std::abs(ball_integral_log(q2, 1)) < 1e-15);
  CHECK(ball_integral_log(q3, 0) == doctest::Approx(-kLog3 / 2).epsilon(1e-15));

  CHECK(sphere_integral_shifted_log(q2, 0) == doctest::Approx(-kLog2).epsilon(1e-15));
  CHECK(sphere_integral_shifted_log(q2, 1) == doctest::Approx(-kLog2).epsilon(1e-15));
  CHECK(sphere_integral_shifted_log(q3, 1) == doctest::Approx(kLog3 / 2).epsilon(1e-15));

  CHECK_THROWS_AS(ball_integral_power(q2, 0.0, 0), ValidationError);
  CHECK_THROWS_AS(sphere_integral_shifted_power(q2, -1.0, 0), ValidationError);
}

TEST_CASE("radial sums") {
  const FieldParams q2(2), q3(3);
  const auto one = oracle_radial_sum<std::complex<double>>(
      q2, [](int) { return std::complex<double>(1.0); }, -30, 0);
  CHECK(std::abs(one - 1.0) < 1e-9);
  const auto power = oracle_radial_sum<std::complex<double>>(
      q3, [&](int k) { return std::complex<double>(q3.pow(k * 1.0)); }, -40, 0);
  CHECK(std::abs(power - 0.75) < 1e-9);
  const auto logs = oracle_radial_sum<std::complex<double>>(
      q2, [&](int k) { return std::complex<double>(k * kLog2); }, -40, 0);
  CHECK(std::abs(logs + kLog2) < 1e-9);
  CHECK_THROWS_AS(oracle_radial_sum<double>(q2, [](int) { return 1.0; }, 1, 0), ValidationError);
}

TEST_CASE("closed forms against truncated shell sums") {
  for (int q : {2, 3, 5, 7}) {
    const FieldParams fp(q);
    for (double alpha : {0.3, 0.5, 1.5, 2.0, 3.0}) {
      for (int n = -8; n <= 8; ++n) {
        const int low = n - static_cast<int>(std::ceil(60.0 / alpha));
        const double sum = oracle_radial_sum<double>(
            fp, [&](int k) { return fp.pow(k * (alpha - 1.0)); }, low, n);
        CAPTURE(q);
        CAPTURE(alpha);
        CAPTURE(n);
        CHECK(rel(sum, ball_integral_power(fp, alpha, n)) /
                  std::max(1.0, ball_integral_power(fp, alpha, n)) <
              1e-10);
        CHECK(rel(oracle::ball_integral_power(fp, alpha, n), ball_integral_power(fp, alpha, n)) <
              1e-10 * std::max(1.0, ball_integral_power(fp, alpha, n)));
        CHECK(std::abs(oracle::sphere_integral_shifted_power(fp, alpha, n) -
                       sphere_integral_shifted_power(fp, alpha, n)) <=
              1e-10 * std::max(1.0, sphere_integral_shifted_power(fp, alpha, n)));
      }
    }
    for (int n = -8; n <= 8; ++n) {
      const double scale = std::max(1.0, fp.pow(n) * (std::abs(n) + 1));
      CHECK(std::abs(oracle::ball_integral_log(fp, n) - ball_integral_log(fp, n)) <= 1e-10 * scale);
      CHECK(std::abs(oracle::sphere_integral_shifted_log(fp, n) -
                     sphere_integral_shifted_log(fp, n)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("shifted sphere decomposition") {
  // Shells strictly inside carry |x - a| = |a|; the excluded-digit sector
  // carries |x - a| = |a| as well; the fixed-digit sector is handled by the
  // inner closed form on the level below.
  for (int q : {2, 3, 5}) {
    const FieldParams fp(q);
    for (double alpha : {0.5, 2.0}) {
      for (int n = -3; n <= 3; ++n) {
        const double inner = ball_integral_power(fp, alpha, n - 1);
        const double sector = sector_volume_excluded_digit(fp, n) * fp.pow((alpha - 1.0) * n);
        CHECK(rel(inner + sector, sphere_integral_shifted_power(fp, alpha, n)) < 1e-13);
      }
    }
  }
}

TEST_CASE("scaling between levels") {
  for (int q : {2, 3, 7}) {
    const FieldParams fp(q);
    for (double alpha : {0.5, 2.0}) {
      for (int n : {-4, 3}) {
        CHECK(rel(ball_integral_power(fp, alpha, n),
                  ball_integral_power(fp, alpha, 0) * fp.pow(alpha * n)) < 1e-14);
        CHECK(rel(sphere_integral_shifted_power(fp, alpha, n),
                  sphere_integral_shifted_power(fp, alpha, 0) * fp.pow(alpha * n)) < 1e-14);
      }
    }
    for (int n : {-4, 3}) {
      // Integral of log|x| over a ball of radius q^n: rescaled value plus the
      // constant n log q times the volume.
      const double shifted = fp.pow(n) * (ball_integral_log(fp, 0) + n * fp.log_q());
      CHECK(std::abs(ball_integral_log(fp, n) - shifted) < 1e-12 * std::max(1.0, fp.pow(n)) * 10);
      const double sphere_shift =
          fp.pow(n) * (sphere_integral_shifted_log(fp, 0) + n * fp.log_q() * sphere_volume(fp, 0));
      CHECK(std::abs(sphere_integral_shifted_log(fp, n) - sphere_shift) <
            1e-12 * std::max(1.0, fp.pow(n)) * 10);
    }
  }
}
