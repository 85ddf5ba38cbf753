#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace k2ie {

enum class KernelFamily { gaussian };

// Shift-invariant RKHS kernel parameters. The multiplicative Gaussian
// k(x,x') = exp(-|beta o (x-x')|^2) with per-axis inverse length-scales.
struct KernelParams {
  KernelFamily family = KernelFamily::gaussian;
  Eigen::VectorXd beta;

  KernelParams() = default;
  explicit KernelParams(Eigen::VectorXd beta_);
  int dim() const { return static_cast<int>(beta.size()); }
};

double kernel_exact(const KernelParams& params, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y);

// 2M cosine features with paired frequencies: row m+M duplicates row m and
// phases are 0 for the first half, -pi/2 for the second, so that
// phi(x)^T phi(x') averages cos(w^T (x-x')).
class FeatureMap {
public:
  FeatureMap(Eigen::MatrixXd omega, Eigen::VectorXd theta, KernelParams params,
             std::uint64_t seed, bool qmc);

  int half_count() const { return static_cast<int>(omega_.rows()) / 2; }
  int count() const { return static_cast<int>(omega_.rows()); }
  int dim() const { return static_cast<int>(omega_.cols()); }
  const Eigen::MatrixXd& omega() const { return omega_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  const KernelParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  bool qmc() const { return qmc_; }

  Eigen::VectorXd features(const Eigen::VectorXd& x) const;
  // Row-wise feature matrix for a set of points (N x 2M).
  Eigen::MatrixXd features_matrix(const Eigen::MatrixXd& points) const;

private:
  Eigen::MatrixXd omega_;   // 2M x d
  Eigen::VectorXd theta_;   // 2M
  KernelParams params_;
  std::uint64_t seed_;
  bool qmc_;
};

// Draws frequencies from the kernel's spectral density; with qmc=true an
// axis-wise Halton sequence (origin skipped) is pushed through the inverse
// Gaussian CDF, otherwise pseudo-random normals seeded by `seed`.
FeatureMap build_feature_map(const KernelParams& params, int M,
                             std::uint64_t seed, bool qmc);

// Radical-inverse Halton value for index >= 1 in the given prime base.
double halton(std::uint64_t index, unsigned base);

}  // namespace k2ie
