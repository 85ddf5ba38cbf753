#pragma once

// Shared oracles for the test suites: quadrature and Monte Carlo
// integration kept independent of the closed forms they check.

#include <Eigen/Core>
#include <cmath>
#include <functional>

#include "k2ie/domain.hpp"
#include "k2ie/point_pattern.hpp"
#include "k2ie/rng.hpp"

namespace k2ie::testutil {

using Fn1D = std::function<double(double)>;

inline double simpson(const Fn1D& f, double a, double b) {
  const double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson(const Fn1D& f, double a, double b, double eps,
                               double whole, int depth) {
  const double c = 0.5 * (a + b);
  const double left = simpson(f, a, c);
  const double right = simpson(f, c, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, c, eps / 2.0, left, depth - 1) +
         adaptive_simpson(f, c, b, eps / 2.0, right, depth - 1);
}

inline double integrate_1d(const Fn1D& f, double a, double b,
                           double eps = 1e-12) {
  return adaptive_simpson(f, a, b, eps, simpson(f, a, b), 40);
}

using FnNd = std::function<double(const Eigen::VectorXd&)>;

// Plain Monte Carlo over a domain; error ~ sd/sqrt(n).
inline double mc_integrate(const FnNd& f, const Domain& domain, std::size_t n,
                           std::uint64_t seed = 42) {
  Rng rng(mix_seed(seed));
  const auto pts = domain.sample_uniform(n, rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) acc += f(pts.point(k));
  return acc / static_cast<double>(n) * domain.measure();
}

}  // namespace k2ie::testutil
