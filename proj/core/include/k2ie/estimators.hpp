#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>

#include "k2ie/domain.hpp"
#include "k2ie/equivalent_kernel.hpp"
#include "k2ie/features.hpp"
#include "k2ie/point_pattern.hpp"

namespace k2ie {

class FittedModel {
public:
  virtual ~FittedModel() = default;

  virtual std::string tag() const = 0;
  virtual const Domain& domain() const = 0;

  // Pointwise intensity; clip applies max(.,0).
  virtual double intensity(const Eigen::VectorXd& x, bool clip = true) const = 0;
  // Expected count over a region; clip applies max(.,0) to the integral.
  virtual double integral(const Domain& region, bool clip = true) const = 0;

  // Poisson pmf of the event count over a region at the clipped integral.
  double count_probability(const Domain& region, std::uint64_t n) const;

  virtual std::string to_json() const = 0;
};

// K2IE: lambda(x) = sum_n h(x,x_n) = phi(x)^T xi, closed form, no iteration.
class FittedK2IE : public FittedModel {
public:
  FittedK2IE(std::shared_ptr<const EquivalentKernel> ek, Eigen::VectorXd xi,
             std::size_t n_events);

  std::string tag() const override { return "k2ie"; }
  const Domain& domain() const override { return ek_->domain(); }
  const EquivalentKernel& ek() const { return *ek_; }
  const Eigen::VectorXd& xi() const { return xi_; }
  std::size_t n_events() const { return n_events_; }

  double intensity(const Eigen::VectorXd& x, bool clip = true) const override;
  double integral(const Domain& region, bool clip = true) const override;
  // int_X lambda^2 dx = xi^T A xi, exact under the degenerate form.
  double integral_squared() const;
  double integral_squared(const Domain& region) const;

  std::string to_json() const override;

private:
  std::shared_ptr<const EquivalentKernel> ek_;
  Eigen::VectorXd xi_;
  std::size_t n_events_;
};

// Classical kernel intensity estimator with analytic edge correction.
class FittedKIE : public FittedModel {
public:
  FittedKIE(PointPattern events, KernelParams params, Domain domain);

  std::string tag() const override { return "kie"; }
  const Domain& domain() const override { return domain_; }
  const PointPattern& events() const { return events_; }
  const KernelParams& params() const { return params_; }
  bool empty_warning() const { return events_.size() == 0; }

  // Edge correction nu(x) = int_X g(x,s) ds, erf product-sum per rectangle.
  double nu(const Eigen::VectorXd& x) const;

  double intensity(const Eigen::VectorXd& x, bool clip = true) const override;
  // Monte Carlo over the region (deterministic internal seed).
  double integral(const Domain& region, bool clip = true) const override;

  std::string to_json() const override;

private:
  PointPattern events_;
  KernelParams params_;
  Domain domain_;
};

struct OptimizerConfig {
  double step = 0.01;
  int max_iters = 2000;
  double tol = 1e-5;
};

// Flaxman-style estimator: lambda(x) = (sum_n alpha_n h(x,x_n))^2 with alpha
// fitted by Adam on the dual objective.
class FittedFIE : public FittedModel {
public:
  FittedFIE(std::shared_ptr<const EquivalentKernel> ek, Eigen::VectorXd alpha,
            PointPattern events);

  std::string tag() const override { return "fie"; }
  const Domain& domain() const override { return ek_->domain(); }
  const EquivalentKernel& ek() const { return *ek_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const PointPattern& events() const { return events_; }

  double latent(const Eigen::VectorXd& x) const;  // f(x)
  double intensity(const Eigen::VectorXd& x, bool clip = true) const override;
  // Analytic via w^T A^S w in feature space.
  double integral(const Domain& region, bool clip = true) const override;

  std::string to_json() const override;

private:
  std::shared_ptr<const EquivalentKernel> ek_;
  Eigen::VectorXd alpha_;
  PointPattern events_;
  Eigen::VectorXd w_;  // f(x) = phi(x)^T w, w = B Phi^T alpha
};

FittedK2IE fit_k2ie(const PointPattern& events, const KernelParams& params,
                    const Domain& domain, double gamma, int M, std::uint64_t seed,
                    bool qmc = true);
FittedK2IE fit_k2ie(std::shared_ptr<const EquivalentKernel> ek,
                    const PointPattern& events);

FittedKIE fit_kie(const PointPattern& events, const KernelParams& params,
                  const Domain& domain);

struct FIEFitInfo {
  int iterations = 0;
  double objective = 0.0;
  double grad_inf_norm = 0.0;
};

FittedFIE fit_fie(const PointPattern& events, const KernelParams& params,
                  const Domain& domain, double gamma, int M, std::uint64_t seed,
                  const OptimizerConfig& opt = {}, FIEFitInfo* info = nullptr,
                  bool qmc = true);
FittedFIE fit_fie(std::shared_ptr<const EquivalentKernel> ek,
                  const PointPattern& events, const OptimizerConfig& opt = {},
                  FIEFitInfo* info = nullptr);

// Dual objective of the dense problem; exposed for tests.
double fie_objective(const Eigen::MatrixXd& psi, const Eigen::VectorXd& alpha,
                     double gamma);

std::unique_ptr<FittedModel> model_from_json(const std::string& text);
std::unique_ptr<FittedModel> load_model(const std::string& path);
void save_model(const FittedModel& model, const std::string& path);

}  // namespace k2ie
