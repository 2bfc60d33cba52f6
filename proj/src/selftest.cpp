#include "sagnac/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "sagnac/evolution.hpp"
#include "sagnac/fock.hpp"
#include "sagnac/parity.hpp"
#include "sagnac/sweep.hpp"

namespace sagnac::selftest {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(const char* fmt, double value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

CheckResult coherent_overlap_identity() {
  const std::complex<double> betas[] = {
      {0.3, 0.0}, {-0.7, 0.4}, {0.0, 0.9}, {0.5, -0.5}};
  double worst = 0;
  for (const auto& b1 : betas)
    for (const auto& b2 : betas) {
      const auto lhs =
          overlap(coherent_vector(b1, Index(60)), coherent_vector(b2, Index(60)));
      const auto rhs = coherent_phase_overlap(b1, 0.0, b2, 0.0);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return {"coherent-overlap identity (n_max=60)", worst <= 1e-10,
          describe("max |materialized - identity| = %.3g", worst)};
}

CheckResult closed_form_vs_quadrature() {
  const PhysicalParams<double> params;
  double worst = 0;
  for (double ws = 0.0; ws <= 1.0; ws += 0.25)
    for (double wp = 0.2; wp <= 1.0; wp += 0.2) {
      const auto profile = DriveProfile<double>::constant(ws, wp);
      for (SpinBranch branch : both_branches) {
        const auto alpha = displacement_alpha(params, profile, branch);
        const auto alpha_q =
            displacement_alpha_quadrature(params, profile, branch);
        const double phi = dynamical_phase(params, profile, branch);
        const double phi_q =
            dynamical_phase_quadrature(params, profile, branch);
        worst = std::max(worst, std::abs(alpha - alpha_q));
        worst = std::max(worst, std::abs(phi - phi_q));
      }
    }
  return {"closed-form alpha/phi vs adaptive quadrature", worst <= 1e-10,
          describe("max abs deviation = %.3g", worst)};
}

CheckResult integrator_vs_branch_state(const Options& options) {
  const PhysicalParams<double> params;
  double worst_infidelity = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double ws = 0.05 * i;          // [0, 0.2]
      const double wp = 0.3 + 0.1 * j;     // [0.3, 0.7]
      const auto profile = DriveProfile<double>::constant(ws, wp);
      IntegratorConfig<double> config;
      config.n_max = options.n_max;
      if (options.dt)
        config.dt = std::min(*options.dt, profile.total_time() / 100);
      const auto result =
          integrate(params, profile, SpinBranch::up, config);
      const auto predicted = branch_state(params, profile, SpinBranch::up);
      const auto reference =
          coherent_vector(predicted.coherent_amplitude, options.n_max,
                          predicted.dynamical_phase);
      const double fidelity = std::norm(overlap(reference, result.state));
      worst_infidelity = std::max(worst_infidelity, 1 - fidelity);
    }
  return {"Fock integrator vs closed-form branch state (5x5 grid)",
          worst_infidelity <= 1e-7,
          describe("max infidelity = %.3g", worst_infidelity)};
}

CheckResult brute_force_qfi_equivalence() {
  const PhysicalParams<double> params;
  double worst = 0;
  for (long n = 1; n <= 3; ++n)
    for (double ws : {0.0, 0.05, 0.1})
      for (double wp : {0.5, 0.55, 0.6}) {
        const GhzModel<double> model{
            params, DriveProfile<double>::constant(ws, wp), n};
        const double exact = qfi_exact(model).value;
        const double brute = qfi_brute_force(model, Index(6)).value;
        worst = std::max(worst, std::abs(exact - brute) / exact);
      }
  return {"brute-force tensor QFI vs product-branch engine (N<=3)",
          worst <= 1e-6, describe("max relative gap = %.3g", worst)};
}

CheckResult brute_force_parity_equivalence() {
  const PhysicalParams<double> params;
  double worst_mean = 0;
  double worst_second = 0;
  for (long n = 1; n <= 3; ++n)
    for (double ws : {0.0, 0.05, 0.1})
      for (double wp : {0.5, 0.55, 0.6}) {
        const GhzModel<double> model{
            params, DriveProfile<double>::constant(ws, wp), n};
        const auto brute = parity_brute_force(model, Index(8));
        worst_mean = std::max(
            worst_mean,
            std::abs(brute.mean - parity_expectation_exact(model)));
        worst_second = std::max(worst_second, std::abs(brute.second_moment - 1));
      }
  const bool pass = worst_mean <= 1e-10 && worst_second <= 1e-12;
  return {"brute-force tensor parity vs cross-overlap engine (N<=3)", pass,
          describe("max <P> gap = %.3g", worst_mean) +
              describe(", max |<P^2>-1| = %.3g", worst_second)};
}

CheckResult exact_engine_involution() {
  const PhysicalParams<double> params;
  double worst = 0;
  for (long n : {1L, 4L, 9L})
    for (double wp : {0.4, 0.5, 0.6}) {
      const GhzModel<double> model{
          params, DriveProfile<double>::constant(0.07, wp), n};
      const auto moments = parity_moments_exact(model);
      worst = std::max(worst, std::abs(moments.second_moment - 1));
      worst = std::max(worst, std::abs(moments.variance -
                                       (1 - moments.mean * moments.mean)));
    }
  return {"exact parity engine reports <P^2> = 1", worst == 0,
          describe("max deviation = %.3g", worst)};
}

CheckResult heisenberg_qfi() {
  const PhysicalParams<double> params;
  double worst = 0;
  for (long n = 1; n <= 20; ++n) {
    const GhzModel<double> model{params,
                                 DriveProfile<double>::constant(0.1, 0.5), n};
    const double expected = 4 * kPi * kPi * double(n) * double(n);
    worst = std::max(worst,
                     std::abs(qfi_exact(model).value - expected) / expected);
    worst = std::max(
        worst,
        std::abs(qfi_truncated_analytic(model).value - expected) / expected);
  }
  return {"Heisenberg QFI 4 pi^2 N^2 at omega_p = 1/2 (both engines)",
          worst <= 1e-6, describe("max relative error = %.3g", worst)};
}

CheckResult parity_fringe_identity() {
  const PhysicalParams<double> params;
  const long n = 5;
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    const double ws = i / 200.0;
    const GhzModel<double> model{params,
                                 DriveProfile<double>::constant(ws, 0.5), n};
    const double expected = -std::cos(2 * double(n) * kPi * ws);
    worst = std::max(worst,
                     std::abs(parity_expectation_exact(model) - expected));
  }
  return {"parity fringe (-1)^N cos(2 N pi omega_s) at omega_p = 1/2",
          worst <= 1e-12, describe("max abs deviation = %.3g", worst)};
}

CheckResult precision_flat_heisenberg() {
  const PhysicalParams<double> params;
  double worst = 0;
  double worst_saturation = 0;
  for (long n = 1; n <= 10; ++n) {
    const double ideal = rotation_precision_ideal(n);
    for (double fraction : {0.125, 0.25, 0.375}) {
      const double ws = fraction / double(n);  // fringe phase in (0, pi)
      const GhzModel<double> model{
          params, DriveProfile<double>::constant(ws, 0.5), n};
      const double delta = rotation_precision(model);
      worst = std::max(worst, std::abs(delta - ideal) / ideal);
      const double bound = qcrb(qfi_exact(model));
      worst_saturation =
          std::max(worst_saturation, std::abs(delta - bound) / bound);
    }
  }
  const bool pass = worst <= 1e-9 && worst_saturation <= 1e-9;
  return {"rotation precision flat at 1/(2 pi N), saturating the QCRB", pass,
          describe("max relative error vs ideal = %.3g", worst) +
              describe(", vs QCRB = %.3g", worst_saturation)};
}

CheckResult determinism(const Options& options) {
  sweep::SweepSpec spec;
  spec.axes = {sweep::AxisSpec{"N", 1, 16, 9, false}};
  spec.omega_p = {0.5, 0.6};
  spec.workers = 1;
  const std::string serial = sweep::qfi_scaling(spec).body_string();
  spec.workers = std::max(8, options.workers);
  const std::string parallel = sweep::qfi_scaling(spec).body_string();
  return {"table body identical for workers 1 vs 8", serial == parallel,
          serial == parallel ? "byte-identical" : "bodies differ"};
}

}  // namespace

std::vector<CheckResult> run_all(const Options& options) {
  std::vector<CheckResult> results;
  results.push_back(coherent_overlap_identity());
  results.push_back(closed_form_vs_quadrature());
  results.push_back(integrator_vs_branch_state(options));
  results.push_back(brute_force_qfi_equivalence());
  results.push_back(brute_force_parity_equivalence());
  results.push_back(exact_engine_involution());
  results.push_back(heisenberg_qfi());
  results.push_back(parity_fringe_identity());
  results.push_back(precision_flat_heisenberg());
  results.push_back(determinism(options));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace sagnac::selftest
