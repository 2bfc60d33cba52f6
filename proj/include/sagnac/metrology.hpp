#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "sagnac/evolution.hpp"
#include "sagnac/fock.hpp"

namespace sagnac {

/// N-particle GHZ input evolved by the state-dependent drive: internal states
/// maximally entangled, every external factor starting in |0>.
template <typename Scalar = double>
struct GhzModel {
  PhysicalParams<Scalar> params{};
  DriveProfile<Scalar> profile = DriveProfile<Scalar>::constant(0.1, 0.5);
  long n_particles = 1;

  void validate() const {
    params.validate();
    if (n_particles < 1) throw std::domain_error("n_particles must be >= 1");
  }

  GhzModel shifted(Scalar omega_s) const {
    return GhzModel{params, profile.with_omega_s(omega_s), n_particles};
  }
};

enum class Engine { exact_branch, truncated_analytic, brute_force };

constexpr const char* engine_name(Engine e) {
  switch (e) {
    case Engine::exact_branch: return "exact-branch";
    case Engine::truncated_analytic: return "truncated-analytic";
    default: return "brute-force";
  }
}

template <typename Scalar = double>
struct QfiResult {
  Scalar value;
  Engine engine;
};

namespace detail {

// First-derivative overlaps of one branch state with respect to omega_s,
// s = <chi|chi'> and g = <chi'|chi'>, from central differences evaluated
// entirely through the coherent-overlap identity.
template <typename Scalar>
struct BranchDerivative {
  Complex<Scalar> s;
  Scalar g;
};

template <typename Scalar>
BranchDerivative<Scalar> branch_derivative(const PhysicalParams<Scalar>& params,
                                           const DriveProfile<Scalar>& profile,
                                           SpinBranch branch, Scalar h) {
  const Scalar ws = profile.omega_s();
  const BranchState<Scalar> center = branch_state(params, profile, branch);
  const BranchState<Scalar> plus =
      branch_state(params, profile.with_omega_s(ws + h), branch);
  const BranchState<Scalar> minus =
      branch_state(params, profile.with_omega_s(ws - h), branch);
  const Complex<Scalar> o_cp = branch_overlap(center, plus);
  const Complex<Scalar> o_cm = branch_overlap(center, minus);
  // (2 - 2 Re<plus|minus>) / (4 h^2), with the defect evaluated in a
  // cancellation-free form: the raw difference loses half the mantissa for
  // nearly identical states and would cap the QFI accuracy near 1e-8.
  const Scalar defect = coherent_overlap_defect(
      plus.coherent_amplitude, plus.dynamical_phase, minus.coherent_amplitude,
      minus.dynamical_phase);
  BranchDerivative<Scalar> d;
  d.s = (o_cp - o_cm) / (2 * h);
  d.g = defect / (2 * h * h);
  return d;
}

// QFI of the GHZ output by the product-branch reduction. With branch states
// chi_sigma and N particles,
//   <Psi'|Psi'> = (1/2) sum_sigma [N g_sigma + N(N-1) |s_sigma|^2],
//   <Psi'|Psi>  = (1/2) sum_sigma N conj(s_sigma);
// spin orthogonality kills every cross-branch term.
template <typename Scalar>
Scalar qfi_ghz_at_step(const GhzModel<Scalar>& model, Scalar h) {
  const Scalar n = Scalar(model.n_particles);
  Scalar deriv_norm = 0;
  Complex<Scalar> cross(0, 0);
  for (SpinBranch branch : both_branches) {
    const BranchDerivative<Scalar> d =
        branch_derivative(model.params, model.profile, branch, h);
    deriv_norm += Scalar(0.5) * (n * d.g + n * (n - 1) * std::norm(d.s));
    cross += Scalar(0.5) * n * std::conj(d.s);
  }
  return 4 * (deriv_norm - std::norm(cross));
}

// QFI of the product (coherent-spin) input: additive over particles, so
// N times the single-particle value 2(g_up + g_down) - |s_up + s_down|^2.
template <typename Scalar>
Scalar qfi_css_at_step(const GhzModel<Scalar>& model, Scalar h) {
  Scalar sum_g = 0;
  Complex<Scalar> sum_s(0, 0);
  for (SpinBranch branch : both_branches) {
    const BranchDerivative<Scalar> d =
        branch_derivative(model.params, model.profile, branch, h);
    sum_g += d.g;
    sum_s += d.s;
  }
  const Scalar single = 2 * sum_g - std::norm(sum_s);
  return Scalar(model.n_particles) * single;
}

template <typename Scalar, typename F>
Scalar with_step_check(F&& evaluate, Scalar h) {
  const Scalar full = evaluate(h);
  const Scalar half = evaluate(h / 2);
  const Scalar scale = std::max(std::abs(full), std::abs(half));
  if (std::abs(full - half) > Scalar(1e-6) * scale &&
      std::abs(full - half) > Scalar(1e-12))
    throw step_size_error(
        "finite-difference step is cancellation-dominated; results at h and "
        "h/2 disagree beyond 1e-6 relative");
  return full;
}

template <typename Scalar>
Scalar clamp_nonnegative(Scalar f) {
  if (f < 0) {
    if (f < Scalar(-1e-9))
      throw std::runtime_error("Fisher information came out negative");
    return 0;
  }
  return f;
}

}  // namespace detail

/// QFI of the GHZ output state via exact branch states, with derivative
/// overlaps taken by central finite differences of step d_omega (checked
/// against the halved step).
template <typename Scalar>
QfiResult<Scalar> qfi_exact(const GhzModel<Scalar>& model,
                            Scalar d_omega = Scalar(1e-5)) {
  model.validate();
  if (!(d_omega > 0)) throw std::domain_error("d_omega must be positive");
  const Scalar f = detail::with_step_check(
      [&](Scalar h) { return detail::qfi_ghz_at_step(model, h); }, d_omega);
  return {detail::clamp_nonnegative(f), Engine::exact_branch};
}

/// Closed-form QFI of the ground-state-truncated output (constant drives
/// only): prefactor N^2 m^2 r^4 / (hbar^2 w^2 w_p^2) times a drive bracket
/// times a brace in D_+/- = exp[m r^2 (w_s +/- w_p)^2 (cos(pi w / w_p) - 1)
/// / (hbar w)]. Valid where the ground-state truncation is (F_0 near 1).
template <typename Scalar>
QfiResult<Scalar> qfi_truncated_analytic(const GhzModel<Scalar>& model) {
  model.validate();
  if (!model.profile.is_constant())
    throw unsupported_profile_error(
        "truncated-analytic QFI requires a constant drive");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar m = model.params.mass;
  const Scalar hbar = model.params.hbar;
  const Scalar w = model.params.trap_frequency;
  const Scalar r = model.params.radius;
  const Scalar ws = model.profile.omega_s();
  const Scalar wp = model.profile.constant_omega_p();
  const Scalar n = Scalar(model.n_particles);

  const Scalar cosw = std::cos(pi * w / wp);
  const Scalar sinw = std::sin(pi * w / wp);
  const Scalar bracket =
      pi * pi * w * w + 2 * wp * wp - 2 * wp * (wp * cosw + pi * w * sinw);
  const Scalar d_plus =
      std::exp(m * r * r * (ws + wp) * (ws + wp) * (cosw - 1) / (hbar * w));
  const Scalar d_minus =
      std::exp(m * r * r * (ws - wp) * (ws - wp) * (cosw - 1) / (hbar * w));
  const Scalar dpn = std::pow(d_plus, n);
  const Scalar dmn = std::pow(d_minus, n);
  const Scalar mixed = dmn * (ws - wp) + dpn * (ws + wp);
  const Scalar brace = 2 * dmn * (wp - ws) * (wp - ws) +
                       2 * dpn * (wp + ws) * (wp + ws) - mixed * mixed;
  const Scalar prefactor =
      m * m * n * n * r * r * r * r / (hbar * hbar * w * w * wp * wp);
  return {detail::clamp_nonnegative(prefactor * bracket * brace),
          Engine::truncated_analytic};
}

/// QFI of the unentangled (coherent-spin) input under the same drive.
template <typename Scalar>
QfiResult<Scalar> qfi_coherent_spin(const GhzModel<Scalar>& model,
                                    Scalar d_omega = Scalar(1e-5)) {
  model.validate();
  if (!(d_omega > 0)) throw std::domain_error("d_omega must be positive");
  const Scalar f = detail::with_step_check(
      [&](Scalar h) { return detail::qfi_css_at_step(model, h); }, d_omega);
  return {detail::clamp_nonnegative(f), Engine::exact_branch};
}

namespace detail {

inline void check_tensor_capacity(long n_particles, Index n_max) {
  if (n_particles > 4 || n_max > 8)
    throw capacity_error(
        "brute-force oracle is limited to N <= 4 and n_max <= 8");
}

template <typename Scalar>
ComplexVector<Scalar> tensor_power(const ComplexVector<Scalar>& x, long n) {
  ComplexVector<Scalar> result = x;
  for (long k = 1; k < n; ++k) {
    ComplexVector<Scalar> next(result.size() * x.size());
    for (Index i = 0; i < result.size(); ++i)
      next.segment(i * x.size(), x.size()) = result(i) * x;
    result = std::move(next);
  }
  return result;
}

// Single-particle spin (x) external factor for one branch, with the external
// coherent state renormalized after truncation. Local layout:
// index = s (n_max + 1) + n with s = 0 for up, 1 for down.
template <typename Scalar>
ComplexVector<Scalar> branch_factor(const PhysicalParams<Scalar>& params,
                                    const DriveProfile<Scalar>& profile,
                                    SpinBranch branch, Index n_max) {
  const BranchState<Scalar> state = branch_state(params, profile, branch);
  FockVector<Scalar> chi = coherent_vector(state.coherent_amplitude, n_max,
                                           state.dynamical_phase);
  chi /= chi.norm();
  ComplexVector<Scalar> factor =
      ComplexVector<Scalar>::Zero(2 * (n_max + 1));
  const Index offset = branch == SpinBranch::up ? 0 : n_max + 1;
  factor.segment(offset, n_max + 1) = chi;
  return factor;
}

}  // namespace detail

/// Full N-particle GHZ output state materialized in the tensor-product basis
/// (per-particle dimension 2 (n_max + 1)), normalized.
template <typename Scalar>
ComplexVector<Scalar> ghz_output_state(const GhzModel<Scalar>& model,
                                       Index n_max) {
  model.validate();
  detail::check_tensor_capacity(model.n_particles, n_max);
  const ComplexVector<Scalar> up =
      detail::branch_factor(model.params, model.profile, SpinBranch::up, n_max);
  const ComplexVector<Scalar> down = detail::branch_factor(
      model.params, model.profile, SpinBranch::down, n_max);
  ComplexVector<Scalar> psi =
      detail::tensor_power(up, model.n_particles) +
      detail::tensor_power(down, model.n_particles);
  psi /= psi.norm();
  return psi;
}

/// Full N-particle coherent-spin output state (product of identical
/// single-particle superpositions), normalized.
template <typename Scalar>
ComplexVector<Scalar> css_output_state(const GhzModel<Scalar>& model,
                                       Index n_max) {
  model.validate();
  detail::check_tensor_capacity(model.n_particles, n_max);
  ComplexVector<Scalar> single =
      detail::branch_factor(model.params, model.profile, SpinBranch::up,
                            n_max) +
      detail::branch_factor(model.params, model.profile, SpinBranch::down,
                            n_max);
  single /= single.norm();
  return detail::tensor_power(single, model.n_particles);
}

/// QFI definition applied directly to a finite-difference stencil of the
/// output state: F = 4 [ <d|d> - |<d|psi>|^2 ] with d = (plus - minus)/(2h).
template <typename Scalar>
Scalar qfi_from_finite_difference(const ComplexVector<Scalar>& minus,
                                  const ComplexVector<Scalar>& center,
                                  const ComplexVector<Scalar>& plus,
                                  Scalar h) {
  if (minus.size() != center.size() || plus.size() != center.size())
    throw shape_error("finite-difference states must share one basis");
  const ComplexVector<Scalar> d = (plus - minus) / (2 * h);
  return 4 * (d.squaredNorm() - std::norm(d.dot(center)));
}

/// Validation oracle: QFI from the materialized tensor state, finite-
/// differenced in omega_s, no product-branch shortcuts.
template <typename Scalar>
QfiResult<Scalar> qfi_brute_force(const GhzModel<Scalar>& model, Index n_max,
                                  Scalar d_omega = Scalar(1e-5)) {
  model.validate();
  detail::check_tensor_capacity(model.n_particles, n_max);
  const Scalar ws = model.profile.omega_s();
  const ComplexVector<Scalar> center = ghz_output_state(model, n_max);
  const ComplexVector<Scalar> plus =
      ghz_output_state(model.shifted(ws + d_omega), n_max);
  const ComplexVector<Scalar> minus =
      ghz_output_state(model.shifted(ws - d_omega), n_max);
  const Scalar f = qfi_from_finite_difference(minus, center, plus, d_omega);
  return {detail::clamp_nonnegative(f), Engine::brute_force};
}

/// Quantum Cramer-Rao bound 1 / sqrt(nu F_Q) over nu repetitions.
template <typename Scalar>
Scalar qcrb(const QfiResult<Scalar>& f, long nu = 1) {
  if (nu < 1) throw std::domain_error("nu must be >= 1");
  if (!(f.value > 0))
    throw unidentifiable_parameter_error(
        "zero Fisher information: parameter is unidentifiable");
  return 1 / std::sqrt(Scalar(nu) * f.value);
}

/// Least-squares slope of log(value) against log(N).
template <typename Scalar>
Scalar scaling_exponent(const std::vector<std::pair<Scalar, Scalar>>& points) {
  if (points.size() < 3)
    throw std::domain_error("scaling fit needs at least 3 points");
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, value] : points) {
    if (!(n > 0 && value > 0))
      throw std::domain_error("scaling fit needs positive data");
    const Scalar x = std::log(n);
    const Scalar y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const Scalar count = Scalar(points.size());
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace sagnac
