#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sagnac/evolution.hpp"
#include "sagnac/fock.hpp"

using namespace sagnac;
namespace {
constexpr double kPi = std::numbers::pi;
using Profile = DriveProfile<double>;
const PhysicalParams<double> kParams;

FockVector<double> predicted_state(const Profile& profile, SpinBranch branch,
                                   Index n_max) {
  const auto state = branch_state(kParams, profile, branch);
  return coherent_vector(state.coherent_amplitude, n_max,
                         state.dynamical_phase);
}
}  // namespace

TEST_CASE("hamiltonian matrix is tridiagonal, Hermitian, harmonic diagonal") {
  const auto drive = Profile::constant(0.1, 0.5);
  const Index n_max = 6;
  const auto h =
      hamiltonian_matrix(kParams, drive, SpinBranch::up, 0.3, n_max);
  CHECK(h.rows() == n_max + 1);
  // exact Hermiticity by construction
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  for (Index i = 0; i <= n_max; ++i) {
    CHECK(h(i, i) == Complex<double>(double(i), 0));
    for (Index j = 0; j <= n_max; ++j)
      if (std::abs(i - j) > 1) CHECK(h(i, j) == Complex<double>(0, 0));
  }
  // |<1|H|0>| = hbar A sqrt(1); cross-checked against coupling_amplitude
  CHECK(std::abs(h(1, 0)) ==
        doctest::Approx(std::sqrt(0.5) * 0.6).epsilon(1e-12));
  CHECK(std::abs(h(1, 0)) ==
        doctest::Approx(kParams.hbar * coupling_amplitude(
                                           kParams, drive, SpinBranch::up, 0.3))
            .epsilon(1e-14));
}

TEST_CASE("zero drive amplitude leaves a pure oscillator matrix") {
  // down branch with omega_p == omega_s has vanishing coupling
  const auto drive = Profile::constant(0.25, 0.25);
  const auto h =
      hamiltonian_matrix(kParams, drive, SpinBranch::down, 1.0, 5);
  for (Index i = 0; i <= 5; ++i)
    for (Index j = 0; j <= 5; ++j)
      CHECK(h(i, j) == (i == j ? Complex<double>(double(i), 0)
                               : Complex<double>(0, 0)));
}

TEST_CASE("overlap is the conjugate-linear inner product") {
  FockVector<double> e0 = FockVector<double>::Zero(5);
  FockVector<double> e1 = FockVector<double>::Zero(5);
  e0(0) = 1;
  e1(1) = 1;
  CHECK(overlap(e0, e1) == Complex<double>(0, 0));
  CHECK(overlap(e0, e0) == Complex<double>(1, 0));

  FockVector<double> v(5);
  v << Complex<double>(0.2, 0.1), Complex<double>(0, -0.4),
      Complex<double>(0.5, 0), Complex<double>(0.1, 0.1),
      Complex<double>(-0.3, 0.2);
  const auto self = overlap(v, v);
  CHECK(self.imag() == doctest::Approx(0.0).epsilon(1e-16));
  CHECK(self.real() >= 0.0);

  FockVector<double> shorter = FockVector<double>::Zero(4);
  CHECK_THROWS_AS(overlap(v, shorter), shape_error);
}

TEST_CASE("materialized coherent overlaps reproduce the identity") {
  const Complex<double> betas[] = {
      {0.0, 0.0}, {0.4, 0.0}, {-0.3, 0.6}, {0.0, -0.9}, {0.7, 0.7}};
  for (const auto& b1 : betas)
    for (const auto& b2 : betas) {
      const auto lhs =
          overlap(coherent_vector(b1, Index(60)), coherent_vector(b2, Index(60)));
      const auto rhs = coherent_phase_overlap(b1, 0.0, b2, 0.0);
      CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("integrator reproduces the surviving ground state at omega_p=0.5") {
  const auto drive = Profile::constant(0.1, 0.5);
  IntegratorConfig<double> config;  // defaults: n_max=40, dt=T/20000
  const auto result = integrate(kParams, drive, SpinBranch::up, config);
  const auto prediction = predicted_state(drive, SpinBranch::up, config.n_max);
  CHECK(std::norm(overlap(prediction, result.state)) >= 1.0 - 1e-8);
  CHECK(result.norm_loss <= 1e-10);
}

TEST_CASE("integrator ground projection matches the closed form at 0.6") {
  const auto drive = Profile::constant(0.1, 0.6);
  IntegratorConfig<double> config;
  const auto result = integrate(kParams, drive, SpinBranch::up, config);
  CHECK(std::norm(result.state(0)) ==
        doctest::Approx(0.782704538241868).epsilon(1e-6));
}

TEST_CASE("zero drive amplitude keeps the ground state exactly") {
  const auto drive = Profile::constant(0.1, 0.1);
  IntegratorConfig<double> config;
  config.n_max = 8;
  const auto result = integrate(kParams, drive, SpinBranch::down, config);
  CHECK(std::norm(result.state(0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oracle equivalence on a drive subgrid") {
  for (double ws : {0.0, 0.2})
    for (double wp : {0.3, 0.7}) {
      const auto drive = Profile::constant(ws, wp);
      IntegratorConfig<double> config;
      const auto result = integrate(kParams, drive, SpinBranch::up, config);
      const auto prediction =
          predicted_state(drive, SpinBranch::up, config.n_max);
      CHECK(std::norm(overlap(prediction, result.state)) >= 1.0 - 1e-7);
    }
}

TEST_CASE("midpoint stepping preserves the norm") {
  const auto drive = Profile::constant(0.15, 0.45);
  IntegratorConfig<double> config;
  const auto result = integrate(kParams, drive, SpinBranch::up, config);
  // unitary steps: the accumulated loss stays at rounding level
  CHECK(result.norm_loss <= 20000 * 1e-12);
  CHECK(result.top_level_population <= 1e-8);
}

TEST_CASE("midpoint handles time-dependent drives") {
  const auto ramp = Profile::sampled(0.1, {{0.0, 0.8}, {6.0, 0.4}});
  IntegratorConfig<double> config;
  config.n_max = 24;
  config.dt = total_time(ramp) / 2000.0;
  const auto result = integrate(kParams, ramp, SpinBranch::up, config);
  const auto prediction = predicted_state(ramp, SpinBranch::up, config.n_max);
  CHECK(std::norm(overlap(prediction, result.state)) >= 1.0 - 1e-10);
}

TEST_CASE("rk4 cross-validates and converges at fourth order") {
  const auto ramp = Profile::sampled(0.1, {{0.0, 0.8}, {6.0, 0.4}});
  const auto prediction = predicted_state(ramp, SpinBranch::up, 24);
  double errors[2];
  int idx = 0;
  for (long steps : {400L, 800L}) {
    IntegratorConfig<double> config;
    config.n_max = 24;
    config.dt = total_time(ramp) / double(steps);
    config.method = StepMethod::rk4;
    const auto result = integrate(kParams, ramp, SpinBranch::up, config);
    errors[idx++] = (result.state - prediction).norm();
  }
  CHECK(errors[0] / errors[1] >= 4.0);  // measured ratio is ~16
  CHECK(errors[1] <= 1e-7);
}

TEST_CASE("default cutoff holds displacements up to |beta| ~ 1.5") {
  // (0.75, 0.35) drives |beta|^2 to ~2.3; n_max = 40 keeps the leakage
  // far below the declared 1e-8 bound
  const auto drive = Profile::constant(0.75, 0.35);
  const auto state = branch_state(kParams, drive, SpinBranch::up);
  CHECK(std::abs(state.coherent_amplitude) > 1.4);
  IntegratorConfig<double> config;
  const auto result = integrate(kParams, drive, SpinBranch::up, config);
  CHECK(result.norm_loss <= 1e-8);
  CHECK(result.top_level_population <= 1e-8);
  const auto prediction = predicted_state(drive, SpinBranch::up, config.n_max);
  CHECK(std::norm(overlap(prediction, result.state)) >= 1.0 - 1e-7);
}

TEST_CASE("leakage beyond the declared bound raises a truncation error") {
  // |beta|^2 ~ 1.2 at this drive; n_max = 4 cannot hold it
  const auto drive = Profile::constant(0.3, 0.7);
  IntegratorConfig<double> config;
  config.n_max = 4;
  CHECK_THROWS_AS(integrate(kParams, drive, SpinBranch::up, config),
                  truncation_error);
}

TEST_CASE("integrator config is validated") {
  const auto drive = Profile::constant(0.1, 0.5);
  IntegratorConfig<double> config;
  config.n_max = 2;
  CHECK_THROWS_AS(integrate(kParams, drive, SpinBranch::up, config),
                  std::domain_error);
  config.n_max = 16;
  config.dt = total_time(drive);  // violates dt <= T/100
  CHECK_THROWS_AS(integrate(kParams, drive, SpinBranch::up, config),
                  std::domain_error);
}
