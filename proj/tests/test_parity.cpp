#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sagnac/parity.hpp"

using namespace sagnac;
namespace {
constexpr double kPi = std::numbers::pi;
using Profile = DriveProfile<double>;
const PhysicalParams<double> kParams;

GhzModel<double> model(double ws, double wp, long n) {
  return {kParams, Profile::constant(ws, wp), n};
}
}  // namespace

TEST_CASE("parity expectation on the bright line is the pure fringe") {
  // <P> = (-1)^N cos(2 N pi omega_s) at omega_p = 1/2
  CHECK(parity_expectation_exact(model(0.1, 0.5, 5)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (long n : {1L, 2L, 5L})
    for (double wp : {0.25, 0.5}) {
      const double expected = n % 2 == 0 ? 1.0 : -1.0;
      CHECK(parity_expectation_exact(model(0.0, wp, n)) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("at omega_s = 0 the cross overlap is real and damps the sign") {
  // branches sit in |beta> and |-beta>, so K = e^{-2|beta|^2} and
  // <P> = (-1)^N e^{-2 N |beta|^2}; equal to (-1)^N only where beta = 0.
  // The tensor oracle pins the same values in its own test below.
  for (long n : {1L, 2L, 5L})
    for (double wp : {0.4, 0.6}) {
      const auto m = model(0.0, wp, n);
      const auto up = branch_state(kParams, m.profile, SpinBranch::up);
      const double expected = (n % 2 == 0 ? 1.0 : -1.0) *
                              std::exp(-2.0 * double(n) *
                                       std::norm(up.coherent_amplitude));
      CHECK(parity_expectation_exact(m) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("fringe identity across omega_s at omega_p = 1/2") {
  const long n = 5;
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    const double ws = i / 200.0;
    const double expected = -std::cos(2 * double(n) * kPi * ws);
    worst = std::max(worst, std::abs(parity_expectation_exact(
                                model(ws, 0.5, n)) -
                            expected));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("fringe is periodic in omega_s with period 1/N") {
  for (long n : {2L, 5L})
    for (double ws : {0.03, 0.11, 0.27}) {
      const double a = parity_expectation_exact(model(ws, 0.5, n));
      const double b =
          parity_expectation_exact(model(ws + 1.0 / double(n), 0.5, n));
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("fringe contrast drops off the bright line") {
  // |K|^N < 1 once the branches stop returning to the ground state
  const double off = std::abs(parity_expectation_exact(model(0.1, 0.6, 5)));
  CHECK(off < 0.5);
  // frozen from the cross-overlap engine, checked against the tensor oracle
  CHECK(parity_expectation_exact(model(0.1, 0.6, 5)) ==
        doctest::Approx(0.143481136548413).epsilon(1e-9));
}

TEST_CASE("exact engine reports the involution moments") {
  for (long n : {1L, 3L, 8L})
    for (double wp : {0.4, 0.5, 0.6}) {
      const auto moments = parity_moments_exact(model(0.08, wp, n));
      CHECK(moments.engine == Engine::exact_branch);
      CHECK(moments.second_moment == 1.0);
      CHECK(moments.variance == 1.0 - moments.mean * moments.mean);
      CHECK(moments.mean >= -1.0);
      CHECK(moments.mean <= 1.0);
    }
}

TEST_CASE("truncated moments collapse to the simple fringe at omega_p=1/2") {
  const auto moments = parity_moments_truncated(model(0.1, 0.5, 5));
  CHECK(moments.engine == Engine::truncated_analytic);
  CHECK(moments.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moments.second_moment == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moments.variance == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(parity_moments_truncated(model(0.0, 0.5, 3)).mean ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("truncated moments reproduce the damped fringe at omega_p = 0.6") {
  const auto moments = parity_moments_truncated(model(0.1, 0.6, 5));
  // independent transcription: damping exp(-N (wp^2+ws^2)(1-cos(pi/wp)))
  // with 1 - cos(5 pi / 3) = 1/2
  const double damping = std::exp(-5 * 0.37 * 0.5);
  CHECK(damping == doctest::Approx(0.3965).epsilon(1e-3));
  const double fringe =
      std::cos(2 * 5 * 0.1 * (0.6 * std::sin(kPi / 0.6) - kPi));
  CHECK(moments.mean == doctest::Approx(-fringe * damping).epsilon(1e-12));
  // cross-check against the exact engine: same fringe argument, stronger
  // damping in the exact cross overlap
  const double exact = parity_expectation_exact(model(0.1, 0.6, 5));
  CHECK(std::signbit(exact) == std::signbit(moments.mean));
  CHECK(std::abs(exact) < std::abs(moments.mean));
}

TEST_CASE("truncated coefficients stay inside the unit ball") {
  // the truncation coefficient modulus is e^{-|alpha|^2 / 2} <= 1, so the
  // truncated moments can never exceed 1 in magnitude
  for (double ws : {0.0, 0.1, 0.3})
    for (double wp : {0.35, 0.5, 0.8})
      for (long n : {1L, 5L}) {
        const auto moments = parity_moments_truncated(model(ws, wp, n));
        CHECK(std::abs(moments.mean) <= 1.0 + 1e-15);
        CHECK(moments.second_moment <= 1.0 + 1e-15);
        CHECK(moments.second_moment > 0.0);
      }
}

TEST_CASE("truncated engine agrees on the bright line, degrades off it") {
  const auto gap = [](double wp) {
    return std::abs(parity_expectation_exact(model(0.1, wp, 5)) -
                    parity_moments_truncated(model(0.1, wp, 5)).mean);
  };
  CHECK(gap(0.5) <= 1e-9);
  CHECK(gap(0.5) < gap(0.55));
  CHECK(gap(0.55) < gap(0.6));
}

TEST_CASE("truncated moments require the unit system and constant drive") {
  PhysicalParams<double> scaled;
  scaled.radius = 2.0;
  const GhzModel<double> nonunit{scaled, Profile::constant(0.1, 0.5), 3};
  CHECK_THROWS_AS(parity_moments_truncated(nonunit),
                  unsupported_configuration_error);
  const GhzModel<double> sampled{
      kParams, Profile::sampled(0.1, {{0.0, 0.5}, {10.0, 0.5}}), 3};
  CHECK_THROWS_AS(parity_moments_truncated(sampled),
                  unsupported_profile_error);
}

TEST_CASE("rotation precision reproduces the Heisenberg plateau") {
  // at omega_p = 1/2 the estimator is flat at 1/(2 pi N) away from extrema
  for (long n : {1L, 2L, 5L, 10L}) {
    const double ideal = rotation_precision_ideal(n);
    for (double fraction : {0.125, 0.25, 0.375}) {
      const double ws = fraction / double(n);
      CHECK(rotation_precision(model(ws, 0.5, n)) ==
            doctest::Approx(ideal).epsilon(1e-9));
    }
  }
  CHECK(rotation_precision(model(0.05, 0.5, 5)) ==
        doctest::Approx(1.0 / (10 * kPi)).epsilon(1e-9));
}

TEST_CASE("precision halves when N doubles") {
  // operating points chosen mid-fringe for both N
  const double d5 = rotation_precision(model(0.05, 0.5, 5));
  const double d10 = rotation_precision(model(0.025, 0.5, 10));
  CHECK(d10 == doctest::Approx(d5 / 2).epsilon(1e-9));
}

TEST_CASE("fringe extremum raises the insensitive-operating-point error") {
  // 2 N pi omega_s = pi at N=5, omega_s=0.1: <P> = +1, slope 0
  CHECK_THROWS_AS(rotation_precision(model(0.1, 0.5, 5)),
                  insensitive_point_error);
  CHECK_THROWS_AS(rotation_precision(model(0.0, 0.5, 3)),
                  insensitive_point_error);
}

TEST_CASE("estimator never beats the quantum bound") {
  for (long n : {1L, 2L, 5L})
    for (double point : {0.21, 0.37}) {
      const double ws = point / double(n);
      const auto m = model(ws, 0.5, n);
      const double bound = qcrb(qfi_exact(m));
      CHECK(rotation_precision(m) >= bound - 1e-9);
    }
  // off the bright line the estimator is strictly worse than the QCRB
  const auto m = model(0.07, 0.6, 4);
  CHECK(rotation_precision(m) > qcrb(qfi_exact(m)));
}

TEST_CASE("truncated precision closed form") {
  // flat 1/(2 pi N) at omega_p = 1/2, via the analytic derivative
  for (long n : {1L, 4L, 9L})
    CHECK(rotation_precision_truncated(model(0.31 / double(n), 0.5, n)) ==
          doctest::Approx(rotation_precision_ideal(n)).epsilon(1e-12));
  CHECK(rotation_precision_truncated(model(0.05, 0.5, 5)) ==
        doctest::Approx(0.0318309886183791).epsilon(1e-12));
  // reduced measurement precision away from the bright line
  CHECK(rotation_precision_truncated(model(0.1, 0.6, 5)) ==
        doctest::Approx(0.0737170125076514).epsilon(1e-9));
  CHECK(rotation_precision_truncated(model(0.1, 0.6, 5)) >
        1.0 / (10 * kPi));
  CHECK_THROWS_AS(rotation_precision_truncated(model(0.0, 0.5, 5)),
                  insensitive_point_error);
}

TEST_CASE("ideal precision follows the 1/N law") {
  CHECK(rotation_precision_ideal(1) ==
        doctest::Approx(0.159155).epsilon(1e-5));
  CHECK(rotation_precision_ideal(5) ==
        doctest::Approx(0.031831).epsilon(1e-4));
  CHECK(rotation_precision_ideal(10) ==
        doctest::Approx(rotation_precision_ideal(5) / 2).epsilon(1e-12));
  CHECK_THROWS_AS(rotation_precision_ideal(0), std::domain_error);
}

TEST_CASE("tensor oracle validates the cross-overlap parity engine") {
  for (long n = 1; n <= 3; ++n)
    for (double ws : {0.0, 0.05, 0.1})
      for (double wp : {0.5, 0.55, 0.6}) {
        const auto m = model(ws, wp, n);
        const auto brute = parity_brute_force(m, 8);
        CHECK(brute.engine == Engine::brute_force);
        CHECK(std::abs(brute.mean - parity_expectation_exact(m)) <= 1e-10);
        CHECK(brute.second_moment == doctest::Approx(1.0).epsilon(1e-12));
      }
  CHECK(parity_brute_force(model(0.0, 0.5, 2), 8).mean ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parity oracle respects the capacity guard") {
  CHECK_THROWS_AS(parity_brute_force(model(0.1, 0.5, 5), 8), capacity_error);
  CHECK_THROWS_AS(parity_brute_force(model(0.1, 0.5, 2), 12), capacity_error);
}
