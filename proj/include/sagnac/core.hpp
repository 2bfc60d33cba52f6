#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sagnac/errors.hpp"
#include "sagnac/types.hpp"

namespace sagnac {

/// Oscillator constants fixing the scale of every formula. The default unit
/// system m = hbar = omega = r = 1 makes all quantities dimensionless.
template <typename Scalar = double>
struct PhysicalParams {
  Scalar mass = 1;
  Scalar hbar = 1;
  Scalar trap_frequency = 1;
  Scalar radius = 1;

  void validate() const {
    if (!(mass > 0 && hbar > 0 && trap_frequency > 0 && radius > 0))
      throw std::domain_error("physical parameters must be strictly positive");
  }

  bool is_unit_system() const {
    return mass == Scalar(1) && hbar == Scalar(1) &&
           trap_frequency == Scalar(1) && radius == Scalar(1);
  }
};

/// The two counter-rotating spin branches. eta fixes the rotation direction.
enum class SpinBranch { up, down };

constexpr std::array<SpinBranch, 2> both_branches{SpinBranch::up,
                                                  SpinBranch::down};

template <typename Scalar = double>
constexpr Scalar eta(SpinBranch branch) {
  return branch == SpinBranch::up ? Scalar(1) : Scalar(-1);
}

constexpr const char* branch_name(SpinBranch branch) {
  return branch == SpinBranch::up ? "up" : "down";
}

/// Rotation protocol: the frequency omega_s under estimation plus the induced
/// drive omega_p(t), either constant or piecewise-linear between samples.
/// The total time T is derived at construction from the half-turn condition
/// on the running integral of omega_p and is not user-settable.
template <typename Scalar = double>
class DriveProfile {
 public:
  struct Knot {
    Scalar time;
    Scalar value;
  };

  static DriveProfile constant(Scalar omega_s, Scalar omega_p) {
    if (!(omega_p > 0))
      throw std::domain_error("constant drive requires omega_p > 0");
    DriveProfile p;
    p.omega_s_ = omega_s;
    p.constant_omega_p_ = omega_p;
    p.total_time_ = std::numbers::pi_v<Scalar> / omega_p;
    return p;
  }

  static DriveProfile sampled(Scalar omega_s, std::vector<Knot> knots) {
    if (knots.size() < 2)
      throw std::domain_error("sampled drive requires at least two knots");
    if (knots.front().time != Scalar(0))
      throw std::domain_error("sampled drive must start at t = 0");
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!(knots[i].value > 0))
        throw std::domain_error("omega_p must be strictly positive");
      if (i > 0 && !(knots[i].time > knots[i - 1].time))
        throw std::domain_error("knot times must be strictly increasing");
    }
    DriveProfile p;
    p.omega_s_ = omega_s;
    p.knots_ = std::move(knots);
    p.total_time_ = solve_half_turn_time(p.knots_);
    return p;
  }

  Scalar omega_s() const { return omega_s_; }
  Scalar total_time() const { return total_time_; }
  bool is_constant() const { return knots_.empty(); }

  Scalar constant_omega_p() const {
    if (!is_constant())
      throw unsupported_profile_error("drive is not constant");
    return constant_omega_p_;
  }

  /// Piecewise-linear drive value at time t in [0, T].
  Scalar omega_p(Scalar t) const {
    if (!(t >= 0 && t <= total_time_))
      throw std::domain_error("time outside [0, T]");
    if (is_constant()) return constant_omega_p_;
    auto it = std::upper_bound(
        knots_.begin(), knots_.end(), t,
        [](Scalar lhs, const Knot& k) { return lhs < k.time; });
    if (it == knots_.begin()) return knots_.front().value;
    if (it == knots_.end()) return knots_.back().value;
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    const Scalar w = (t - lo.time) / (hi.time - lo.time);
    return lo.value + w * (hi.value - lo.value);
  }

  DriveProfile with_omega_s(Scalar omega_s) const {
    DriveProfile p = *this;
    p.omega_s_ = omega_s;
    return p;
  }

  /// Segment boundaries inside [0, T]; quadrature panels are seeded here so
  /// every panel sees a smooth integrand.
  std::vector<Scalar> breakpoints() const {
    std::vector<Scalar> pts{Scalar(0)};
    for (const Knot& k : knots_)
      if (k.time > 0 && k.time < total_time_) pts.push_back(k.time);
    pts.push_back(total_time_);
    return pts;
  }

 private:
  DriveProfile() = default;

  // Running integral of the piecewise-linear drive reaches pi inside one of
  // the segments; the per-segment integral is quadratic in the offset, so the
  // crossing time follows from the stable quadratic-root form.
  static Scalar solve_half_turn_time(const std::vector<Knot>& knots) {
    const Scalar target = std::numbers::pi_v<Scalar>;
    Scalar accumulated = 0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const Scalar dt = knots[i + 1].time - knots[i].time;
      const Scalar v0 = knots[i].value;
      const Scalar v1 = knots[i + 1].value;
      const Scalar segment = (v0 + v1) / 2 * dt;
      if (accumulated + segment >= target) {
        const Scalar remainder = target - accumulated;
        const Scalar slope = (v1 - v0) / dt;
        const Scalar tau =
            2 * remainder / (v0 + std::sqrt(v0 * v0 + 2 * slope * remainder));
        return knots[i].time + tau;
      }
      accumulated += segment;
    }
    throw insufficient_profile_error(
        "running integral of omega_p never reaches pi within the sampled "
        "range");
  }

  Scalar omega_s_ = 0;
  Scalar constant_omega_p_ = 0;
  std::vector<Knot> knots_;
  Scalar total_time_ = 0;
};

/// Total evolution time T. Constant drives give exactly pi / omega_p.
template <typename Scalar>
Scalar total_time(const DriveProfile<Scalar>& profile) {
  return profile.total_time();
}

/// Drive coupling A_sigma(t) = sqrt(m w / 2 hbar) r [w_s + eta_sigma w_p(t)].
template <typename Scalar>
Scalar coupling_amplitude(const PhysicalParams<Scalar>& params,
                          const DriveProfile<Scalar>& profile,
                          SpinBranch branch, Scalar t) {
  const Scalar prefactor =
      std::sqrt(params.mass * params.trap_frequency / (2 * params.hbar)) *
      params.radius;
  return prefactor *
         (profile.omega_s() + eta<Scalar>(branch) * profile.omega_p(t));
}

}  // namespace sagnac
