#pragma once

#include <Eigen/Dense>
#include <complex>

namespace sagnac {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using ComplexVector = Eigen::Vector<Complex<Scalar>, Eigen::Dynamic>;

template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

using Index = Eigen::Index;

// z^n for integer n >= 0 by binary exponentiation; avoids the branch-cut and
// accuracy pitfalls of std::pow on complex arguments.
template <typename Scalar>
Complex<Scalar> pow_int(Complex<Scalar> z, long n) {
  Complex<Scalar> result(1, 0);
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

}  // namespace sagnac
