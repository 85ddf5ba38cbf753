#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <memory>
#include <vector>

#include "k2ie/domain.hpp"
#include "k2ie/features.hpp"

namespace k2ie {

// Closed-form integral of cos(w^T x + theta) over an axis-aligned box.
double zeta(const HyperRect& rect, const Eigen::VectorXd& omega, double theta);

// sinc(t) = sin(t)/t with a series branch near zero.
double sinc(double t);

struct EdgeMatrix {
  Eigen::MatrixXd A;                    // 2M x 2M, symmetric PSD
  std::vector<Eigen::MatrixXd> addends; // per-rectangle A^j; kept when J > 1
};

// Gram integral A = sum_j int_{X_j} phi phi^T dx, entrywise via zeta.
EdgeMatrix edge_matrix(const FeatureMap& map, const Domain& domain);

// Per-feature integrals int_X phi_m dx.
Eigen::VectorXd feature_integral(const FeatureMap& map, const Domain& domain);
Eigen::VectorXd feature_integral(const FeatureMap& map, const HyperRect& rect);

// Degenerate equivalent kernel h(x,x') = phi(x)^T (1/gamma I + A)^{-1} phi(x').
class EquivalentKernel {
public:
  EquivalentKernel(FeatureMap map, Domain domain, double gamma);
  // Reuses a precomputed edge matrix (A depends on map and domain only).
  EquivalentKernel(FeatureMap map, Domain domain, double gamma, EdgeMatrix edge);

  const FeatureMap& map() const { return map_; }
  const Domain& domain() const { return domain_; }
  double gamma() const { return gamma_; }
  const EdgeMatrix& edge() const { return edge_; }
  // Dense (1/gamma I + A)^{-1}; computed on first use and cached. Fitting
  // paths use the factorization directly and never materialize it.
  const Eigen::MatrixXd& B() const;

  double h_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  // psi(x) = L phi(x) with L^T L = B, so h(x,x') = psi(x)^T psi(x').
  Eigen::VectorXd psi(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd psi_matrix(const Eigen::MatrixXd& points) const;

  Eigen::VectorXd apply_B(const Eigen::VectorXd& v) const;

private:
  FeatureMap map_;
  Domain domain_;
  double gamma_;
  EdgeMatrix edge_;
  mutable Eigen::MatrixXd B_;       // lazy (1/gamma I + A)^{-1}; empty until used
  Eigen::LLT<Eigen::MatrixXd> llt_; // of 1/gamma I + A
};

}  // namespace k2ie
