#pragma once

#include <cmath>
#include <optional>
#include <unsupported/Eigen/MatrixFunctions>

#include "sagnac/core.hpp"
#include "sagnac/errors.hpp"
#include "sagnac/types.hpp"

namespace sagnac {

/// Complex amplitude vector in the truncated number basis; index = occupation.
template <typename Scalar = double>
using FockVector = ComplexVector<Scalar>;

enum class StepMethod { midpoint_exponential, rk4 };

template <typename Scalar = double>
struct IntegratorConfig {
  Index n_max = 40;
  // Step size; unset means T / 20000.
  std::optional<Scalar> dt{};
  StepMethod method = StepMethod::midpoint_exponential;
  Scalar leak_tol = Scalar(1e-8);
};

template <typename Scalar = double>
struct IntegrationResult {
  FockVector<Scalar> state;
  Scalar norm_loss;             // |1 - <psi|psi>| at the endpoint
  Scalar top_level_population;  // occupation of the two highest basis levels
  Index steps;
};

/// Single-particle Hamiltonian in the truncated number basis:
/// diagonal hbar w n, off-diagonals +/- i hbar A_sigma(t) sqrt(n).
/// Tridiagonal and Hermitian by construction.
template <typename Scalar>
ComplexMatrix<Scalar> hamiltonian_matrix(const PhysicalParams<Scalar>& params,
                                         const DriveProfile<Scalar>& profile,
                                         SpinBranch branch, Scalar t,
                                         Index n_max) {
  const Index dim = n_max + 1;
  ComplexMatrix<Scalar> h = ComplexMatrix<Scalar>::Zero(dim, dim);
  const Scalar w = params.trap_frequency;
  const Scalar coupling =
      params.hbar * coupling_amplitude(params, profile, branch, t);
  for (Index n = 0; n < dim; ++n) {
    h(n, n) = Complex<Scalar>(params.hbar * w * Scalar(n), 0);
    if (n + 1 < dim) {
      const Scalar off = coupling * std::sqrt(Scalar(n + 1));
      h(n + 1, n) = Complex<Scalar>(0, off);
      h(n, n + 1) = Complex<Scalar>(0, -off);
    }
  }
  return h;
}

/// Coherent state |beta> with global phase, materialized in the truncated
/// basis. Not renormalized after truncation.
template <typename Scalar>
FockVector<Scalar> coherent_vector(Complex<Scalar> beta, Index n_max,
                                   Scalar phase = 0) {
  FockVector<Scalar> v(n_max + 1);
  Complex<Scalar> amp =
      std::polar(std::exp(-Scalar(std::norm(beta)) / 2), phase);
  for (Index n = 0; n <= n_max; ++n) {
    v(n) = amp;
    amp *= beta / std::sqrt(Scalar(n + 1));
  }
  return v;
}

/// Conjugate-linear inner product sum conj(a_n) b_n.
template <typename Scalar>
Complex<Scalar> overlap(const FockVector<Scalar>& a,
                        const FockVector<Scalar>& b) {
  if (a.size() != b.size())
    throw shape_error("overlap requires equal basis cutoffs");
  return a.dot(b);
}

namespace detail {

template <typename Scalar>
void rk4_step(const PhysicalParams<Scalar>& params,
              const DriveProfile<Scalar>& profile, SpinBranch branch,
              Scalar t, Scalar dt, Index n_max, FockVector<Scalar>& psi) {
  auto rhs = [&](Scalar time, const FockVector<Scalar>& y) {
    return (Complex<Scalar>(0, -1) / params.hbar *
            (hamiltonian_matrix(params, profile, branch, time, n_max) * y))
        .eval();
  };
  const FockVector<Scalar> k1 = rhs(t, psi);
  const FockVector<Scalar> k2 = rhs(t + dt / 2, (psi + dt / 2 * k1).eval());
  const FockVector<Scalar> k3 = rhs(t + dt / 2, (psi + dt / 2 * k2).eval());
  const FockVector<Scalar> k4 = rhs(t + dt, (psi + dt * k3).eval());
  psi += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace detail

/// Propagate |0> through the time-dependent Schrodinger equation to t = T in
/// the truncated basis. The midpoint-exponential stepper applies
/// exp(-i H(t_mid) dt / hbar) each step (scaling-and-squaring Pade); constant
/// drives reuse one exponential for every step. rk4 is retained as a second,
/// structurally different scheme for cross-validation.
template <typename Scalar>
IntegrationResult<Scalar> integrate(const PhysicalParams<Scalar>& params,
                                    const DriveProfile<Scalar>& profile,
                                    SpinBranch branch,
                                    const IntegratorConfig<Scalar>& config) {
  if (config.n_max < 4) throw std::domain_error("n_max must be at least 4");
  const Scalar T = profile.total_time();
  const Scalar dt_request = config.dt.value_or(T / 20000);
  if (!(dt_request > 0 && dt_request <= T / 100))
    throw std::domain_error("dt must satisfy 0 < dt <= T/100");
  const Index steps =
      static_cast<Index>(std::ceil(static_cast<double>(T / dt_request)));
  const Scalar dt = T / Scalar(steps);

  const Index dim = config.n_max + 1;
  FockVector<Scalar> psi = FockVector<Scalar>::Zero(dim);
  psi(0) = Complex<Scalar>(1, 0);

  if (config.method == StepMethod::midpoint_exponential) {
    ComplexMatrix<Scalar> propagator;
    const bool frozen = profile.is_constant();
    if (frozen) {
      const ComplexMatrix<Scalar> generator =
          Complex<Scalar>(0, -dt / params.hbar) *
          hamiltonian_matrix(params, profile, branch, T / 2, config.n_max);
      propagator = generator.exp();
    }
    for (Index k = 0; k < steps; ++k) {
      if (!frozen) {
        const Scalar t_mid = (Scalar(k) + Scalar(0.5)) * dt;
        const ComplexMatrix<Scalar> generator =
            Complex<Scalar>(0, -dt / params.hbar) *
            hamiltonian_matrix(params, profile, branch, t_mid, config.n_max);
        propagator = generator.exp();
      }
      psi = propagator * psi;
    }
  } else {
    for (Index k = 0; k < steps; ++k)
      detail::rk4_step(params, profile, branch, Scalar(k) * dt, dt,
                       config.n_max, psi);
  }

  IntegrationResult<Scalar> result;
  result.steps = steps;
  result.norm_loss = std::abs(Scalar(1) - psi.squaredNorm());
  result.top_level_population =
      std::norm(psi(dim - 1)) + (dim > 1 ? std::norm(psi(dim - 2)) : 0);
  if (result.norm_loss > config.leak_tol ||
      result.top_level_population > config.leak_tol)
    throw truncation_error(
        "basis leakage exceeds leak_tol; increase n_max (or reduce dt for "
        "rk4)");
  result.state = std::move(psi);
  return result;
}

}  // namespace sagnac
