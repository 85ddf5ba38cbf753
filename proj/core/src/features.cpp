#include "k2ie/features.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "k2ie/errors.hpp"
#include "k2ie/rng.hpp"

namespace k2ie {

KernelParams::KernelParams(Eigen::VectorXd beta_) : beta(std::move(beta_)) {
  if (beta.size() == 0) throw ConfigError("kernel requires at least one axis");
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (!(beta[i] > 0.0)) throw ConfigError("kernel beta must be positive");
  }
}

double kernel_exact(const KernelParams& params, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) {
  if (x.size() != params.beta.size() || y.size() != params.beta.size()) {
    throw DataError("kernel point dimension mismatch");
  }
  const double s = (params.beta.array() * (x - y).array()).matrix().squaredNorm();
  return std::exp(-s);
}

double halton(std::uint64_t index, unsigned base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

FeatureMap::FeatureMap(Eigen::MatrixXd omega, Eigen::VectorXd theta,
                       KernelParams params, std::uint64_t seed, bool qmc)
    : omega_(std::move(omega)), theta_(std::move(theta)),
      params_(std::move(params)), seed_(seed), qmc_(qmc) {}

Eigen::VectorXd FeatureMap::features(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DataError("feature point dimension mismatch");
  const double scale = 1.0 / std::sqrt(static_cast<double>(half_count()));
  return (((omega_ * x) + theta_).array().cos() * scale).matrix();
}

Eigen::MatrixXd FeatureMap::features_matrix(const Eigen::MatrixXd& points) const {
  if (points.cols() != dim()) throw DataError("feature point dimension mismatch");
  const double scale = 1.0 / std::sqrt(static_cast<double>(half_count()));
  Eigen::MatrixXd z = points * omega_.transpose();  // N x 2M
  z.rowwise() += theta_.transpose();
  return (z.array().cos() * scale).matrix();
}

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

}  // namespace

FeatureMap build_feature_map(const KernelParams& params, int M,
                             std::uint64_t seed, bool qmc) {
  if (M < 1) throw ConfigError("feature half-count M must be >= 1");
  const int d = params.dim();
  if (qmc && d > static_cast<int>(std::size(kPrimes))) {
    throw ConfigError("QMC feature maps support at most 20 dimensions");
  }
  // Spectral density of exp(-|beta o r|^2): per-axis N(0, 2 beta_i^2).
  Eigen::VectorXd sigma = params.beta * std::sqrt(2.0);

  Eigen::MatrixXd omega(2 * M, d);
  if (qmc) {
    const boost::math::normal_distribution<double> normal;
    for (int m = 0; m < M; ++m) {
      for (int i = 0; i < d; ++i) {
        // Skip index 0: the origin maps to an infinite quantile.
        const double u = halton(static_cast<std::uint64_t>(m) + 1,
                                kPrimes[static_cast<std::size_t>(i)]);
        omega(m, i) = sigma[i] * boost::math::quantile(normal, u);
      }
    }
  } else {
    Rng rng(mix_seed(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int m = 0; m < M; ++m) {
      for (int i = 0; i < d; ++i) omega(m, i) = sigma[i] * gauss(rng);
    }
  }
  omega.bottomRows(M) = omega.topRows(M);

  Eigen::VectorXd theta(2 * M);
  theta.head(M).setZero();
  theta.tail(M).setConstant(-M_PI / 2.0);

  return FeatureMap(std::move(omega), std::move(theta), params, seed, qmc);
}

}  // namespace k2ie
