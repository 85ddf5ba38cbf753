#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "k2ie/errors.hpp"
#include "k2ie/features.hpp"
#include "k2ie/rng.hpp"

using namespace k2ie;

namespace {

KernelParams gauss1(double beta = 1.0) {
  Eigen::VectorXd b(1);
  b << beta;
  return KernelParams(b);
}

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("kernel_exact closed forms") {
  CHECK(kernel_exact(gauss1(), vec1(0.3), vec1(0.3)) == doctest::Approx(1.0));
  CHECK(kernel_exact(gauss1(), vec1(0), vec1(1)) == doctest::Approx(std::exp(-1.0)));
  Eigen::VectorXd b2(2), x(2), y(2);
  b2 << 1, 2;
  x << 1, 1;
  y << 0, 0;
  CHECK(kernel_exact(KernelParams(b2), x, y) == doctest::Approx(std::exp(-5.0)));
  CHECK_THROWS_AS(kernel_exact(gauss1(), x, y), DataError);
}

TEST_CASE("structural duplication and phases") {
  const auto map = build_feature_map(gauss1(), 1, 3, true);
  REQUIRE(map.count() == 2);
  CHECK(map.omega()(0, 0) == map.omega()(1, 0));
  CHECK(map.theta()[0] == 0.0);
  CHECK(map.theta()[1] == doctest::Approx(-M_PI / 2.0));
}

TEST_CASE("features at origin") {
  const int M = 8;
  const auto map = build_feature_map(gauss1(), M, 5, false);
  const Eigen::VectorXd phi = map.features(vec1(0.0));
  const double scale = 1.0 / std::sqrt(double(M));
  for (int m = 0; m < M; ++m) {
    CHECK(phi[m] == doctest::Approx(scale));
    CHECK(phi[m + M] == doctest::Approx(0.0).epsilon(1e-12));
  }
  // cos^2 + sin^2: phi(x)^T phi(x) = k(0) = 1 exactly.
  const Eigen::VectorXd phix = map.features(vec1(0.73));
  CHECK(phix.dot(phix) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("QMC frequency variances match the spectral density") {
  const auto map = build_feature_map(gauss1(), 250, 0, true);
  const auto w = map.omega().col(0).head(250);
  const double var = w.squaredNorm() / 250.0 - std::pow(w.mean(), 2);
  CHECK(var == doctest::Approx(2.0).epsilon(0.05));

  Eigen::VectorXd b(2);
  b << 2.0, 0.5;
  const auto map2 = build_feature_map(KernelParams(b), 250, 0, true);
  for (int i = 0; i < 2; ++i) {
    const auto wi = map2.omega().col(i).head(250);
    const double vi = wi.squaredNorm() / 250.0 - std::pow(wi.mean(), 2);
    const double expect = 2.0 * b[i] * b[i];
    CHECK(vi == doctest::Approx(expect).epsilon(0.08));
  }
}

TEST_CASE("feature inner products approximate the kernel") {
  const auto map = build_feature_map(gauss1(), 250, 0, true);
  CHECK(map.features(vec1(1.0)).dot(map.features(vec1(0.0))) ==
        doctest::Approx(std::exp(-1.0)).epsilon(0.15));

  // Uniform error over 100 random pairs in [-2,2]^d for d = 1..3.
  Rng rng(99);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int d = 1; d <= 3; ++d) {
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(d, 1.0);
    const KernelParams params(beta);
    const auto fm = build_feature_map(params, 250, 0, true);
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd x(d), y(d);
      for (int i = 0; i < d; ++i) {
        x[i] = unif(rng);
        y[i] = unif(rng);
      }
      const double approx = fm.features(x).dot(fm.features(y));
      CHECK(std::abs(approx - kernel_exact(params, x, y)) <= 0.08);
      CHECK(fm.features(y).dot(fm.features(x)) == doctest::Approx(approx));
    }
  }
}

TEST_CASE("Gram matrix is positive semi-definite") {
  const auto map = build_feature_map(gauss1(), 100, 2, true);
  Rng rng(5);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  const int n = 30;
  Eigen::MatrixXd G(n, n);
  std::vector<Eigen::VectorXd> phis;
  for (int i = 0; i < n; ++i) phis.push_back(map.features(vec1(unif(rng))));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) G(i, j) = phis[size_t(i)].dot(phis[size_t(j)]);
  }
  const Eigen::MatrixXd S = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("shift invariance of the feature inner product") {
  const auto map = build_feature_map(gauss1(), 64, 7, true);
  const double base = map.features(vec1(0.4)).dot(map.features(vec1(-0.3)));
  for (double t : {0.5, -1.7, 3.14}) {
    const double shifted =
        map.features(vec1(0.4 + t)).dot(map.features(vec1(-0.3 + t)));
    CHECK(shifted == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("feature maps are reproducible bit-for-bit") {
  for (bool qmc : {true, false}) {
    const auto a = build_feature_map(gauss1(), 32, 1234, qmc);
    const auto b = build_feature_map(gauss1(), 32, 1234, qmc);
    CHECK(a.omega() == b.omega());
    CHECK(a.theta() == b.theta());
  }
  const auto a = build_feature_map(gauss1(), 32, 1, false);
  const auto b = build_feature_map(gauss1(), 32, 2, false);
  CHECK(a.omega() != b.omega());
}

TEST_CASE("halton radical inverse basics") {
  CHECK(halton(1, 2) == doctest::Approx(0.5));
  CHECK(halton(2, 2) == doctest::Approx(0.25));
  CHECK(halton(3, 2) == doctest::Approx(0.75));
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3.0));
}
