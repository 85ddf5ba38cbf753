#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "k2ie/errors.hpp"
#include "k2ie/evaluation.hpp"
#include "test_util.hpp"

using namespace k2ie;
using k2ie::testutil::integrate_1d;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

IntensitySpec constant_spec(double value, Domain dom) {
  return IntensitySpec("constant", std::move(dom), value,
                       [value](const Eigen::VectorXd&) { return value; });
}

PointPattern pattern1(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return PointPattern(m);
}

KernelParams gauss1(double beta = 1.0) {
  Eigen::VectorXd b(1);
  b << beta;
  return KernelParams(b);
}

}  // namespace

TEST_CASE("evaluation grid covers the domain with exact weights") {
  const Domain dom({HyperRect(vec2(0, 0), vec2(2, 1)),
                    HyperRect(vec2(3, 0), vec2(4, 2))});
  const auto grid = eval_grid(dom, 20);
  CHECK(grid.weights.sum() == doctest::Approx(dom.measure()).epsilon(1e-12));
  for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
    CHECK(dom.contains(grid.points.row(i).transpose()));
  }
  // Midpoint rule integrates affine functions exactly.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
    acc += grid.weights[i] * (3.0 * grid.points(i, 0) - grid.points(i, 1));
  }
  const double exact = 3.0 * (2.0 * 2.0 / 2.0 + (16.0 - 9.0) / 2.0 * 2.0) -
                       (2.0 * 0.5 + 2.0 * 1.0);
  CHECK(acc == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("errors against a zero model equal the truth's moments") {
  const Domain dom = Domain::interval(0, 1);
  const auto truth = constant_spec(2.0, dom);
  const auto zero = fit_kie(PointPattern::empty(1), gauss1(), dom);
  CHECK(l2_error(truth, zero, 1000) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(labs_error(truth, zero, 1000) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("errors for a fitted model match quadrature of the clipped estimate") {
  const Domain dom = Domain::interval(0, 5);
  const auto truth = constant_spec(1.0, dom);
  const auto model = fit_k2ie(pattern1({1.0, 2.0, 3.5}), gauss1(0.8), dom, 1.0,
                              25, 3);
  const double l2_oracle =
      integrate_1d(
          [&](double x) {
            const double d = 1.0 - model.intensity(vec1(x), /*clip=*/true);
            return d * d;
          },
          0.0, 5.0, 1e-10) /
      5.0;
  const double l1_oracle =
      integrate_1d(
          [&](double x) {
            return std::abs(1.0 - model.intensity(vec1(x), /*clip=*/true));
          },
          0.0, 5.0, 1e-10) /
      5.0;
  CHECK(l2_error(truth, model, 10000) == doctest::Approx(l2_oracle).epsilon(1e-4));
  CHECK(labs_error(truth, model, 10000) ==
        doctest::Approx(l1_oracle).epsilon(1e-3));
}

TEST_CASE("rho counts strict wins") {
  CHECK(rho({1, 2, 3, 4}, {2, 2, 4, 3}) == doctest::Approx(0.5));
  CHECK(rho({1}, {2}) == doctest::Approx(1.0));
  CHECK(rho({2}, {2}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(rho({1, 2}, {1}), DataError);
}

TEST_CASE("negativity ratio counts raw negative grid values") {
  const Domain dom = Domain::interval(0, 50);
  const auto model =
      fit_k2ie(pattern1({5.0, 6.0, 45.0}), gauss1(2.0), dom, 100.0, 100, 5);
  const double ratio = negativity_ratio(model, 500);
  CHECK(ratio > 0.0);
  CHECK(ratio < 1.0);
  // Matches a direct recount on the same grid.
  const auto grid = eval_grid(dom, 500);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
    if (model.intensity(grid.points.row(i).transpose(), /*clip=*/false) < 0.0) {
      neg += 1.0;
    }
  }
  CHECK(ratio == doctest::Approx(neg / double(grid.points.rows())));

  const auto pos = fit_k2ie(pattern1({25.0}), gauss1(0.05), dom, 1.0, 50, 2);
  CHECK(negativity_ratio(pos, 500) >= 0.0);
}

TEST_CASE("test losses match their definitions") {
  const Domain dom = Domain::interval(0, 5);
  const auto model =
      fit_k2ie(pattern1({0.5, 2.0, 2.2, 4.0}), gauss1(), dom, 1.0, 25, 9);
  const auto test = pattern1({1.0, 3.0});
  double data = 0.0;
  for (std::size_t n = 0; n < test.size(); ++n) {
    data += model.intensity(test.point(n), /*clip=*/true);
  }
  CHECK(test_ls_loss(model, test) ==
        doctest::Approx(model.integral_squared() - 2.0 * data).epsilon(1e-10));

  // Count NLL over a 5-cell partition: sum of -log Poisson pmf per cell.
  const Domain cells = partition_box(dom.bounding_box(), 5);
  std::vector<std::uint64_t> counts(cells.n_rects(), 0);
  for (std::size_t k = 0; k < test.size(); ++k) {
    ++counts[std::size_t(cells.rect_index(test.point(k)))];
  }
  double oracle = 0.0;
  for (std::size_t j = 0; j < cells.n_rects(); ++j) {
    const Domain cell({cells.rects()[j]});
    oracle -= std::log(std::max(model.count_probability(cell, counts[j]), 1e-300));
  }
  CHECK(test_count_nll(model, test, cells) ==
        doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("cpu timer measures busy work") {
  volatile double sink = 0.0;
  const double t = cpu_time_seconds([&] {
    for (int i = 0; i < 2000000; ++i) sink = sink + std::sqrt(double(i));
  });
  CHECK(t > 0.0);
  CHECK(t < 10.0);
}

TEST_CASE("metrics CSV layout") {
  CHECK(metrics_csv_header() ==
        "estimator,dataset,trial,L2,Labs,cpu_seconds,negativity_ratio,L_s,L_c");
  MetricsRecord rec;
  rec.estimator = "k2ie";
  rec.dataset = "1d_2";
  rec.trial = 3;
  rec.l2 = 1.5;
  rec.labs = 0.5;
  rec.cpu_seconds = 0.25;
  const auto row = metrics_csv_row(rec);
  CHECK(row.substr(0, 12) == "k2ie,1d_2,3,");
  // Optional metrics stay empty fields.
  CHECK(row.substr(row.size() - 3) == ",,,");
  rec.negativity_ratio = 0.05;
  CHECK(metrics_csv_row(rec).find(",,") != std::string::npos);
}
