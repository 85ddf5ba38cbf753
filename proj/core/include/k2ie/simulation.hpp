#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>

#include "k2ie/domain.hpp"
#include "k2ie/point_pattern.hpp"
#include "k2ie/rng.hpp"

namespace k2ie {

// A known intensity function over a domain with a finite upper bound,
// usable both as a thinning-sampler input and as ground truth for metrics.
class IntensitySpec {
public:
  using Fn = std::function<double(const Eigen::VectorXd&)>;

  IntensitySpec(std::string kind, Domain domain, double lambda_max, Fn fn);

  const std::string& kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  double lambda_max() const { return lambda_max_; }
  double operator()(const Eigen::VectorXd& x) const { return fn_(x); }
  double evaluate(const Eigen::VectorXd& x) const;

  IntensitySpec scaled(double factor) const;
  // Same function restricted to a sub-domain (used after dropping cells).
  IntensitySpec restricted(Domain sub) const;

private:
  std::string kind_;
  Domain domain_;
  double lambda_max_;
  Fn fn_;
};

// The three 1D benchmark intensities.
IntensitySpec intensity_1d_1();  // 2 e^{-x/15} + e^{-[(x-25)/10]^2} on [0,50]
IntensitySpec intensity_1d_2();  // 5 sin(x^2) + 6 on [0,5]
IntensitySpec intensity_1d_3();  // piecewise linear on [0,100]

// Sigmoidal-GP Cox draw on [0,5]^2: RFF-approximated GP with kernel
// e^{-|x-x'|^2/2} through sigma(z) = 50/(1+e^{-20z}).
IntensitySpec sample_gp_cox_2d(std::uint64_t seed);

// Lewis-Shedler thinning: exact sampler for bounded intensities.
PointPattern simulate_thinning(const IntensitySpec& spec, Rng& rng);

// Keeps each cell independently with probability keep_prob; throws DataError
// when all cells are dropped (caller resamples).
Domain drop_subdomains(const Domain& cells, double keep_prob, Rng& rng);

// Restricts a pattern to the points inside a (sub-)domain.
PointPattern filter_to_domain(const PointPattern& events, const Domain& domain);

// Intensity-spec JSON: {"kind": ..., "params": {...}, "seed": ...}. Supported
// kinds: "1d_1", "1d_2", "1d_3" (optional params.factor), "gp_cox_2d"
// (seed), "constant" (params.value, params.domain, optional
// params.lambda_max).
IntensitySpec intensity_spec_from_json(const std::string& text);
IntensitySpec load_intensity_spec(const std::string& path);

}  // namespace k2ie
