#include "k2ie/simulation.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <utility>

#include "k2ie/errors.hpp"
#include "k2ie/features.hpp"

namespace k2ie {

IntensitySpec::IntensitySpec(std::string kind, Domain domain, double lambda_max,
                             Fn fn)
    : kind_(std::move(kind)), domain_(std::move(domain)),
      lambda_max_(lambda_max), fn_(std::move(fn)) {
  if (!(lambda_max_ > 0.0)) throw ConfigError("lambda_max must be positive");
}

double IntensitySpec::evaluate(const Eigen::VectorXd& x) const {
  if (!domain_.contains(x)) throw DataError("intensity evaluated outside domain");
  return fn_(x);
}

IntensitySpec IntensitySpec::scaled(double factor) const {
  if (!(factor > 0.0)) throw ConfigError("scale factor must be positive");
  Fn base = fn_;
  std::string suffix = factor == std::floor(factor)
                           ? std::to_string(static_cast<long>(factor))
                           : std::to_string(factor);
  return IntensitySpec(kind_ + "_x" + suffix, domain_, lambda_max_ * factor,
                       [base, factor](const Eigen::VectorXd& x) {
                         return factor * base(x);
                       });
}

IntensitySpec IntensitySpec::restricted(Domain sub) const {
  return IntensitySpec(kind_, std::move(sub), lambda_max_, fn_);
}

IntensitySpec intensity_1d_1() {
  return IntensitySpec("1d_1", Domain::interval(0.0, 50.0), 3.0,
                       [](const Eigen::VectorXd& x) {
                         const double t = x[0];
                         const double u = (t - 25.0) / 10.0;
                         return 2.0 * std::exp(-t / 15.0) + std::exp(-u * u);
                       });
}

IntensitySpec intensity_1d_2() {
  return IntensitySpec("1d_2", Domain::interval(0.0, 5.0), 11.0,
                       [](const Eigen::VectorXd& x) {
                         return 5.0 * std::sin(x[0] * x[0]) + 6.0;
                       });
}

IntensitySpec intensity_1d_3() {
  // Piecewise linear through (0,2),(25,3),(50,1),(75,2.5),(100,3).
  return IntensitySpec(
      "1d_3", Domain::interval(0.0, 100.0), 3.0, [](const Eigen::VectorXd& x) {
        static const double xs[] = {0.0, 25.0, 50.0, 75.0, 100.0};
        static const double ys[] = {2.0, 3.0, 1.0, 2.5, 3.0};
        const double t = x[0];
        for (int s = 0; s < 4; ++s) {
          if (t <= xs[s + 1] || s == 3) {
            const double w = (t - xs[s]) / (xs[s + 1] - xs[s]);
            return ys[s] + w * (ys[s + 1] - ys[s]);
          }
        }
        return ys[4];
      });
}

IntensitySpec sample_gp_cox_2d(std::uint64_t seed) {
  // GP with kernel e^{-|x-x'|^2/2} drawn as a random combination of 2M=1000
  // Fourier features; intensity through sigma(z) = 50/(1+e^{-20 z}).
  const int M = 500;
  Eigen::VectorXd beta(2);
  beta << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto map = std::make_shared<FeatureMap>(
      build_feature_map(KernelParams(beta), M, seed, true));
  Rng rng = make_rng(seed, 0xc0c5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto weights = std::make_shared<Eigen::VectorXd>(2 * M);
  for (Eigen::Index m = 0; m < weights->size(); ++m) (*weights)[m] = gauss(rng);

  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 5.0, 5.0;
  return IntensitySpec("gp_cox_2d", Domain::box(lo, hi), 50.0,
                       [map, weights](const Eigen::VectorXd& x) {
                         const double z = map->features(x).dot(*weights);
                         return 50.0 / (1.0 + std::exp(-20.0 * z));
                       });
}

PointPattern simulate_thinning(const IntensitySpec& spec, Rng& rng) {
  const Domain& domain = spec.domain();
  const double rate = spec.lambda_max() * domain.measure();
  std::poisson_distribution<long> pois(rate);
  const long n_cand = pois(rng);
  const PointPattern candidates =
      domain.sample_uniform(static_cast<std::size_t>(n_cand), rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Index> keep;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Eigen::VectorXd x = candidates.point(k);
    if (unit(rng) * spec.lambda_max() < spec(x)) {
      keep.push_back(static_cast<Eigen::Index>(k));
    }
  }
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(keep.size()), domain.dim());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    pts.row(static_cast<Eigen::Index>(k)) = candidates.points().row(keep[k]);
  }
  return PointPattern(std::move(pts));
}

Domain drop_subdomains(const Domain& cells, double keep_prob, Rng& rng) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw ConfigError("keep_prob must be in (0,1]");
  }
  if (keep_prob == 1.0) return cells;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<HyperRect> kept;
  for (const auto& rect : cells.rects()) {
    if (unit(rng) < keep_prob) kept.push_back(rect);
  }
  if (kept.empty()) throw DataError("all sub-domains dropped; resample");
  return Domain(std::move(kept));
}

PointPattern filter_to_domain(const PointPattern& events, const Domain& domain) {
  std::vector<Eigen::Index> keep;
  for (std::size_t n = 0; n < events.size(); ++n) {
    if (domain.contains(events.point(n))) keep.push_back(static_cast<Eigen::Index>(n));
  }
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(keep.size()), events.dim());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    pts.row(static_cast<Eigen::Index>(k)) = events.points().row(keep[k]);
  }
  return PointPattern(std::move(pts));
}

IntensitySpec intensity_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid intensity-spec JSON: ") + e.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  const auto params = j.value("params", nlohmann::json::object());
  const double factor = params.value("factor", 1.0);
  if (kind == "1d_1" || kind == "1d_2" || kind == "1d_3") {
    IntensitySpec base = kind == "1d_1"   ? intensity_1d_1()
                         : kind == "1d_2" ? intensity_1d_2()
                                          : intensity_1d_3();
    return factor == 1.0 ? base : base.scaled(factor);
  }
  if (kind == "gp_cox_2d") {
    return sample_gp_cox_2d(j.value("seed", std::uint64_t{0}));
  }
  if (kind == "constant") {
    const double value = params.at("value").get<double>();
    if (!(value >= 0.0)) throw DataError("constant intensity must be >= 0");
    Domain domain = Domain::from_json(params.at("domain").dump());
    const double lmax = params.value("lambda_max", std::max(value, 1e-12));
    return IntensitySpec("constant", std::move(domain), lmax,
                         [value](const Eigen::VectorXd&) { return value; });
  }
  throw ConfigError("unknown intensity kind: " + kind);
}

IntensitySpec load_intensity_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open intensity-spec file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return intensity_spec_from_json(ss.str());
}

}  // namespace k2ie
