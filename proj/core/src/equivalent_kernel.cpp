#include "k2ie/equivalent_kernel.hpp"

#include <cmath>

#include "k2ie/errors.hpp"

namespace k2ie {

double sinc(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

double zeta(const HyperRect& rect, const Eigen::VectorXd& omega, double theta) {
  if (omega.size() != rect.dim()) throw DataError("zeta dimension mismatch");
  double phase = theta;
  double prod = 1.0;
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    const double mid2 = rect.hi[i] + rect.lo[i];
    const double len = rect.hi[i] - rect.lo[i];
    phase += 0.5 * omega[i] * mid2;
    prod *= len * sinc(0.5 * omega[i] * len);
  }
  return std::cos(phase) * prod;
}

namespace {

// sinc(u + v) via the angle-addition expansion (su = sin u etc.), with the
// same near-zero series branch as the scalar sinc().
inline double sinc_sum(double u, double su, double cu, double v, double sv,
                       double cv) {
  const double t = u + v;
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
  return (su * cv + cu * sv) / t;
}

void rect_edge_accumulate(const FeatureMap& map, const HyperRect& rect,
                          Eigen::MatrixXd& A) {
  // The feature map stores each frequency twice (theta = 0 then -pi/2), so A
  // splits into M x M blocks. With a_i = omega_i^T (hi+lo)/2 and
  // s(omega) = prod_k len_k sinc(omega_k len_k / 2), every zeta term expands
  // through cos/sin angle addition into products of per-frequency scalars, so
  // no trigonometric evaluation is needed per pair.
  const int M = map.half_count();
  const Eigen::Index d = rect.dim();
  const auto omega = map.omega().topRows(M);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(M);
  Eigen::MatrixXd b(M, d), sb(M, d), cb(M, d);
  double vol = 1.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double len = rect.hi[k] - rect.lo[k];
    vol *= len;
    a += (0.5 * (rect.hi[k] + rect.lo[k])) * omega.col(k);
    b.col(k) = (0.5 * len) * omega.col(k);
    sb.col(k) = b.col(k).array().sin();
    cb.col(k) = b.col(k).array().cos();
  }
  const Eigen::VectorXd ca = a.array().cos();
  const Eigen::VectorXd sa = a.array().sin();
  const double scale = 1.0 / (2.0 * M);
  for (int i = 0; i < M; ++i) {
    for (int j = i; j < M; ++j) {
      double sp = vol, sm = vol;
      for (Eigen::Index k = 0; k < d; ++k) {
        sp *= sinc_sum(b(i, k), sb(i, k), cb(i, k), b(j, k), sb(j, k),
                       cb(j, k));
        sm *= sinc_sum(b(i, k), sb(i, k), cb(i, k), -b(j, k), -sb(j, k),
                       cb(j, k));
      }
      sp *= scale;
      sm *= scale;
      const double cc = ca[i] * ca[j], ss = sa[i] * sa[j];
      const double sc = sa[i] * ca[j], cs = ca[i] * sa[j];
      const double cap = cc - ss, cam = cc + ss;  // cos(a_i +/- a_j)
      const double sap = sc + cs, sam = sc - cs;  // sin(a_i +/- a_j)
      // theta sums per block: cos/cos -> 0, cos/sin -> -pi/2, sin/sin -> -pi.
      const double v_cc = cap * sp + cam * sm;
      const double v_ss = cam * sm - cap * sp;
      const double v_cs = sap * sp - sam * sm;  // (i, j+M) and (j+M, i)
      const double v_sc = sap * sp + sam * sm;  // (j, i+M) and (i+M, j)
      A(i, j) += v_cc;
      A(i + M, j + M) += v_ss;
      A(i, j + M) += v_cs;
      A(j + M, i) += v_cs;
      if (i != j) {
        A(j, i) += v_cc;
        A(j + M, i + M) += v_ss;
        A(j, i + M) += v_sc;
        A(i + M, j) += v_sc;
      }
    }
  }
}

Eigen::MatrixXd rect_edge_matrix(const FeatureMap& map, const HyperRect& rect) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(map.count(), map.count());
  rect_edge_accumulate(map, rect, A);
  return A;
}

}  // namespace

EdgeMatrix edge_matrix(const FeatureMap& map, const Domain& domain) {
  EdgeMatrix out;
  out.A = Eigen::MatrixXd::Zero(map.count(), map.count());
  if (domain.n_rects() == 1) {
    rect_edge_accumulate(map, domain.rects().front(), out.A);
    return out;
  }
  for (const auto& rect : domain.rects()) {
    Eigen::MatrixXd Aj = rect_edge_matrix(map, rect);
    out.A += Aj;
    out.addends.push_back(std::move(Aj));
  }
  return out;
}

Eigen::VectorXd feature_integral(const FeatureMap& map, const HyperRect& rect) {
  const int n = map.count();
  const double scale = 1.0 / std::sqrt(static_cast<double>(map.half_count()));
  Eigen::VectorXd f(n);
  for (int m = 0; m < n; ++m) {
    f[m] = scale * zeta(rect, map.omega().row(m).transpose(), map.theta()[m]);
  }
  return f;
}

Eigen::VectorXd feature_integral(const FeatureMap& map, const Domain& domain) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(map.count());
  for (const auto& rect : domain.rects()) f += feature_integral(map, rect);
  return f;
}

EquivalentKernel::EquivalentKernel(FeatureMap map, Domain domain, double gamma)
    : EquivalentKernel(map, domain, gamma, edge_matrix(map, domain)) {}

EquivalentKernel::EquivalentKernel(FeatureMap map, Domain domain, double gamma,
                                   EdgeMatrix edge)
    : map_(std::move(map)), domain_(std::move(domain)), gamma_(gamma),
      edge_(std::move(edge)) {
  if (!(gamma_ > 0.0)) throw ConfigError("gamma must be positive");
  if (map_.dim() != domain_.dim()) {
    throw DataError("feature map and domain dimension mismatch");
  }
  const Eigen::Index n = edge_.A.rows();
  llt_.compute(edge_.A + (1.0 / gamma_) *
                             Eigen::MatrixXd::Identity(n, n));
  if (llt_.info() != Eigen::Success) {
    throw NumericError("Cholesky factorization of 1/gamma I + A failed");
  }
}

const Eigen::MatrixXd& EquivalentKernel::B() const {
  if (B_.size() == 0) {
    B_ = llt_.solve(Eigen::MatrixXd::Identity(map_.count(), map_.count()));
  }
  return B_;
}

double EquivalentKernel::h_eval(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) const {
  return map_.features(x).dot(llt_.solve(map_.features(y)));
}

Eigen::VectorXd EquivalentKernel::psi(const Eigen::VectorXd& x) const {
  // L = G^{-1} for C = G G^T lower-triangular, so L^T L = C^{-1} = B.
  return llt_.matrixL().solve(map_.features(x));
}

Eigen::MatrixXd EquivalentKernel::psi_matrix(const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd psit = map_.features_matrix(points).transpose();  // 2M x N
  llt_.matrixL().solveInPlace(psit);
  return psit.transpose();
}

Eigen::VectorXd EquivalentKernel::apply_B(const Eigen::VectorXd& v) const {
  return llt_.solve(v);
}

}  // namespace k2ie
