#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "sagnac/errors.hpp"

namespace sagnac {

namespace detail {

// 15-point Gauss-Legendre rule on [-1, 1], nonnegative abscissae.
inline constexpr double kGaussNodes15[8] = {
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.9372733924007060,
    0.9879925180204854,
};
inline constexpr double kGaussWeights15[8] = {
    0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
    0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
    0.0703660474881081, 0.0307532419961173,
};

template <typename T>
double magnitude(T x) {
  return std::abs(x);
}

}  // namespace detail

/// One 15-node Gauss-Legendre panel over [a, b].
template <typename Scalar, typename F>
auto gauss_panel(F&& f, Scalar a, Scalar b) {
  const Scalar mid = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  auto sum = f(mid) * Scalar(detail::kGaussWeights15[0]);
  for (int i = 1; i < 8; ++i) {
    const Scalar dx = half * Scalar(detail::kGaussNodes15[i]);
    sum += (f(mid + dx) + f(mid - dx)) * Scalar(detail::kGaussWeights15[i]);
  }
  return sum * half;
}

/// Adaptive composite Gauss-Legendre on [a, b]: a panel is accepted when it
/// agrees with its bisection within the locally apportioned absolute
/// tolerance, otherwise the halves recurse. Throws quadrature_error with the
/// achieved estimate when the depth limit is hit before convergence.
template <typename Scalar, typename F>
auto integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar abs_tol,
                        int max_depth = 40) {
  using Value = decltype(f(a));
  struct Recurser {
    F& f;
    Scalar tol_per_width;
    int max_depth;
    Value run(Scalar lo, Scalar hi, const Value& whole, int depth) const {
      const Scalar mid = (lo + hi) / 2;
      const Value left = gauss_panel(f, lo, mid);
      const Value right = gauss_panel(f, mid, hi);
      const double err = detail::magnitude(left + right - whole);
      const double budget =
          static_cast<double>(tol_per_width * (hi - lo));
      if (err <= budget || err == 0.0) return left + right;
      if (depth >= max_depth)
        throw quadrature_error("adaptive quadrature failed to converge", err);
      return run(lo, mid, left, depth + 1) + run(mid, hi, right, depth + 1);
    }
  };
  if (a == b) return decltype(f(a)){};
  Recurser rec{f, abs_tol / (b - a), max_depth};
  return rec.run(a, b, gauss_panel(f, a, b), 0);
}

/// Adaptive integration with panels seeded at the given breakpoints (kinks of
/// a piecewise-smooth integrand).
template <typename Scalar, typename F>
auto integrate_segmented(F&& f, const std::vector<Scalar>& breakpoints,
                         Scalar abs_tol) {
  using Value = decltype(f(breakpoints.front()));
  Value total{};
  const Scalar full = breakpoints.back() - breakpoints.front();
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const Scalar lo = breakpoints[i];
    const Scalar hi = breakpoints[i + 1];
    if (hi == lo) continue;
    total += integrate_adaptive(f, lo, hi, abs_tol * (hi - lo) / full);
  }
  return total;
}

}  // namespace sagnac
