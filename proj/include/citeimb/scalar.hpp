#pragma once

#include <cmath>
#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace citeimb {

using Rational = boost::multiprecision::cpp_rational;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
Scalar ratio(std::int64_t num, std::int64_t den) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return static_cast<Scalar>(num) / static_cast<Scalar>(den);
  } else {
    return Scalar(num, den);
  }
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Equality of running expected counts. Floating point compares within `tol`;
// rationals compare exactly.
inline bool same_count(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool same_count(const Rational& a, const Rational& b, double) { return a == b; }

}  // namespace citeimb
