#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "sagnac/metrology.hpp"

namespace sagnac {

template <typename Scalar = double>
struct ParityMoments {
  Scalar mean;
  Scalar second_moment;
  Scalar variance;
  Engine engine;
};

/// Parity expectation after the balanced pi/2 recombination pulse.
/// With post-pulse single-particle states A (from the up branch) and B (from
/// the down branch), <A|p|A> = <B|p|B> = 0, so only the cross term survives:
///   <P> = (-1)^N Re[(e^{i (phi_down - phi_up)} K)^N],
/// K being the coherent overlap <beta_up|beta_down>.
template <typename Scalar>
Scalar parity_expectation_exact(const GhzModel<Scalar>& model) {
  model.validate();
  const BranchState<Scalar> up =
      branch_state(model.params, model.profile, SpinBranch::up);
  const BranchState<Scalar> down =
      branch_state(model.params, model.profile, SpinBranch::down);
  const Complex<Scalar> cross = branch_overlap(up, down);
  const Scalar sign = model.n_particles % 2 == 0 ? 1 : -1;
  return sign * pow_int(cross, model.n_particles).real();
}

/// Exact parity moments: parity is an involution, so <P^2> = 1 and
/// (Delta P)^2 = 1 - <P>^2.
template <typename Scalar>
ParityMoments<Scalar> parity_moments_exact(const GhzModel<Scalar>& model) {
  const Scalar mean = parity_expectation_exact(model);
  return {mean, Scalar(1), 1 - mean * mean, Engine::exact_branch};
}

/// Closed-form parity moments of the ground-state-truncated output (constant
/// drive, unit constants). <P^2> < 1 here is an artifact of the unnormalized
/// truncation; only the exact engine is physical.
template <typename Scalar>
ParityMoments<Scalar> parity_moments_truncated(const GhzModel<Scalar>& model) {
  model.validate();
  if (!model.profile.is_constant())
    throw unsupported_profile_error(
        "truncated parity moments require a constant drive");
  if (!model.params.is_unit_system())
    throw unsupported_configuration_error(
        "truncated parity moments require m = hbar = omega = r = 1");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar ws = model.profile.omega_s();
  const Scalar wp = model.profile.constant_omega_p();
  const Scalar n = Scalar(model.n_particles);
  const Scalar cosw = std::cos(pi / wp);
  const Scalar sinw = std::sin(pi / wp);
  const Scalar sign = model.n_particles % 2 == 0 ? 1 : -1;

  const Scalar fringe = std::cos(2 * n * ws * (wp * sinw - pi));
  const Scalar damping = std::exp(-n * (wp * wp + ws * ws) * (1 - cosw));
  const Scalar mean = sign * fringe * damping;
  const Scalar second =
      (std::exp(n * (wp - ws) * (wp - ws) * (cosw - 1)) +
       std::exp(n * (wp + ws) * (wp + ws) * (cosw - 1))) /
      2;
  return {mean, second, second - mean * mean, Engine::truncated_analytic};
}

/// Error-propagation estimate Delta w_s = Delta P / |d<P>/d w_s| with the
/// exact engine. The derivative is a central finite difference of step
/// d_omega; near a fringe extremum the difference is indistinguishable from
/// rounding noise and the estimator diverges, reported as an error.
template <typename Scalar>
Scalar rotation_precision(const GhzModel<Scalar>& model,
                          Scalar d_omega = Scalar(1e-6)) {
  model.validate();
  if (!(d_omega > 0)) throw std::domain_error("d_omega must be positive");
  const Scalar ws = model.profile.omega_s();
  auto central = [&](Scalar h) {
    return (parity_expectation_exact(model.shifted(ws + h)) -
            parity_expectation_exact(model.shifted(ws - h))) /
           (2 * h);
  };
  const Scalar deriv = central(d_omega);
  const Scalar deriv_half = central(d_omega / 2);
  const Scalar richardson = (4 * deriv_half - deriv) / 3;
  // |<P>| <= 1 bounds the rounding noise of the difference quotient.
  const Scalar noise_floor =
      16 * std::numeric_limits<Scalar>::epsilon() / d_omega;
  if (std::abs(richardson) < Scalar(1e-12) ||
      std::abs(richardson) <= 4 * std::abs(deriv_half - deriv) ||
      std::abs(richardson) <= noise_floor)
    throw insensitive_point_error(
        "fringe extremum: parity slope vanishes, estimator diverges");
  const Scalar mean = parity_expectation_exact(model);
  return std::sqrt(std::max<Scalar>(0, 1 - mean * mean)) / std::abs(deriv);
}

/// Closed-form error propagation through the truncated parity moments
/// (constant drive, unit constants), with the analytic omega_s derivative.
/// Collapses to 1 / (2 pi N) at w_p = 1/2.
template <typename Scalar>
Scalar rotation_precision_truncated(const GhzModel<Scalar>& model) {
  const ParityMoments<Scalar> moments = parity_moments_truncated(model);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar ws = model.profile.omega_s();
  const Scalar wp = model.profile.constant_omega_p();
  const Scalar n = Scalar(model.n_particles);
  const Scalar one_minus_cos = 1 - std::cos(pi / wp);
  const Scalar phase_rate = pi - wp * std::sin(pi / wp);
  const Scalar theta = 2 * n * ws * phase_rate;
  const Scalar damping = std::exp(-n * (wp * wp + ws * ws) * one_minus_cos);
  const Scalar slope =
      2 * n * damping *
      std::abs(phase_rate * std::sin(theta) +
               ws * one_minus_cos * std::cos(theta));
  if (slope < Scalar(1e-12))
    throw insensitive_point_error(
        "fringe extremum: truncated parity slope vanishes");
  return std::sqrt(std::max<Scalar>(0, moments.variance)) / slope;
}

/// Ideal Heisenberg-limited precision 1 / (2 pi N).
template <typename Scalar = double>
Scalar rotation_precision_ideal(long n_particles) {
  if (n_particles < 1) throw std::domain_error("n_particles must be >= 1");
  return 1 / (2 * std::numbers::pi_v<Scalar> * Scalar(n_particles));
}

namespace detail {

// Balanced pi/2 pulse exp(-i (pi/4) sigma_y) on every particle's spin factor:
// |up> -> (|up> + |down>)/sqrt(2), |down> -> (|down> - |up>)/sqrt(2).
template <typename Scalar>
void apply_half_pi_pulse(ComplexVector<Scalar>& psi, long n_particles,
                         Index fock_dim) {
  const Index local_dim = 2 * fock_dim;
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  Index stride = 1;
  for (long k = 0; k < n_particles; ++k) {
    const Index block = stride * local_dim;
    for (Index base = 0; base < psi.size(); base += block)
      for (Index offset = 0; offset < stride * fock_dim; ++offset) {
        const Index i_up = base + offset;
        const Index i_down = i_up + stride * fock_dim;
        const Complex<Scalar> a = psi(i_up);
        const Complex<Scalar> b = psi(i_down);
        psi(i_up) = (a - b) * inv_sqrt2;
        psi(i_down) = (a + b) * inv_sqrt2;
      }
    stride = block;
  }
}

}  // namespace detail

/// Validation oracle: materialize the tensor output state, apply the pi/2
/// pulse, then the product of single-particle spin parities.
template <typename Scalar>
ParityMoments<Scalar> parity_brute_force(const GhzModel<Scalar>& model,
                                         Index n_max) {
  model.validate();
  detail::check_tensor_capacity(model.n_particles, n_max);
  ComplexVector<Scalar> psi = ghz_output_state(model, n_max);
  const Index fock_dim = n_max + 1;
  detail::apply_half_pi_pulse(psi, model.n_particles, fock_dim);

  const Index local_dim = 2 * fock_dim;
  Scalar mean = 0;
  Scalar second = 0;
  for (Index i = 0; i < psi.size(); ++i) {
    int downs = 0;
    Index rest = i;
    for (long k = 0; k < model.n_particles; ++k) {
      const Index local = rest % local_dim;
      if (local >= fock_dim) ++downs;
      rest /= local_dim;
    }
    const Scalar sign = downs % 2 == 0 ? 1 : -1;
    const Scalar p = std::norm(psi(i));
    mean += sign * p;
    second += p;
  }
  return {mean, second, second - mean * mean, Engine::brute_force};
}

}  // namespace sagnac
