#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace nhfp {

using cx = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector2cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr cx I{0.0, 1.0};

/// Fold x into the half-open window [-w/2, w/2).
inline double fold_halfopen(double x, double w) {
  return x - w * std::floor(x / w + 0.5);
}

/// Circular distance on a ring of circumference w, in [0, w/2].
inline double circ_dist(double a, double b, double w) {
  return std::abs(fold_halfopen(a - b, w));
}

/// Uniform half-open grid of n points covering [lo, hi).
inline VectorXd halfopen_grid(double lo, double hi, int n) {
  VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / n;
  return g;
}

/// Uniform grid of n cell centers covering [lo, hi).
inline VectorXd center_grid(double lo, double hi, int n) {
  VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * (i + 0.5) / n;
  return g;
}

}  // namespace nhfp
