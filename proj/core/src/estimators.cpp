#include "k2ie/estimators.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "k2ie/errors.hpp"
#include "k2ie/rng.hpp"

namespace k2ie {

using json = nlohmann::json;

namespace {

constexpr double kLogFloor = 1e-10;
constexpr std::size_t kKieMcPoints = 100000;
constexpr std::uint64_t kKieMcSeed = 0x51a7e5;

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

json pattern_to_json(const PointPattern& p) {
  json rows = json::array();
  for (std::size_t n = 0; n < p.size(); ++n) {
    rows.push_back(to_vec(p.point(n)));
  }
  return rows;
}

PointPattern pattern_from_json(const json& j, int dim) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(j.size()), dim);
  Eigen::Index r = 0;
  for (const auto& row : j) {
    const auto v = row.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != dim) throw DataError("event dimension mismatch");
    for (int c = 0; c < dim; ++c) pts(r, c) = v[static_cast<std::size_t>(c)];
    ++r;
  }
  return PointPattern(std::move(pts));
}

std::shared_ptr<const EquivalentKernel> make_ek(const KernelParams& params,
                                                const Domain& domain, double gamma,
                                                int M, std::uint64_t seed,
                                                bool qmc) {
  return std::make_shared<EquivalentKernel>(build_feature_map(params, M, seed, qmc),
                                            domain, gamma);
}

}  // namespace

double FittedModel::count_probability(const Domain& region,
                                      std::uint64_t n) const {
  const double lam = integral(region, /*clip=*/true);
  if (lam <= 0.0) return n == 0 ? 1.0 : 0.0;
  const double logp = static_cast<double>(n) * std::log(lam) - lam -
                      std::lgamma(static_cast<double>(n) + 1.0);
  return std::exp(logp);
}

// ---------------------------------------------------------------------------
// K2IE

FittedK2IE::FittedK2IE(std::shared_ptr<const EquivalentKernel> ek,
                       Eigen::VectorXd xi, std::size_t n_events)
    : ek_(std::move(ek)), xi_(std::move(xi)), n_events_(n_events) {}

double FittedK2IE::intensity(const Eigen::VectorXd& x, bool clip) const {
  const double v = ek_->map().features(x).dot(xi_);
  return clip ? std::max(v, 0.0) : v;
}

double FittedK2IE::integral(const Domain& region, bool clip) const {
  const double v = feature_integral(ek_->map(), region).dot(xi_);
  return clip ? std::max(v, 0.0) : v;
}

double FittedK2IE::integral_squared() const {
  return xi_.dot(ek_->edge().A * xi_);
}

double FittedK2IE::integral_squared(const Domain& region) const {
  const Eigen::MatrixXd As = edge_matrix(ek_->map(), region).A;
  return xi_.dot(As * xi_);
}

FittedK2IE fit_k2ie(std::shared_ptr<const EquivalentKernel> ek,
                    const PointPattern& events) {
  const int n = ek->map().count();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  if (events.size() > 0) {
    s = ek->map().features_matrix(events.points()).colwise().sum().transpose();
  }
  Eigen::VectorXd xi = ek->apply_B(s);
  return FittedK2IE(std::move(ek), std::move(xi), events.size());
}

FittedK2IE fit_k2ie(const PointPattern& events, const KernelParams& params,
                    const Domain& domain, double gamma, int M, std::uint64_t seed,
                    bool qmc) {
  return fit_k2ie(make_ek(params, domain, gamma, M, seed, qmc), events);
}

std::string FittedK2IE::to_json() const {
  json j;
  j["estimator"] = tag();
  j["beta"] = to_vec(ek_->map().params().beta);
  j["gamma"] = ek_->gamma();
  j["M"] = ek_->map().half_count();
  j["seed"] = ek_->map().seed();
  j["qmc"] = ek_->map().qmc();
  j["domain"] = json::parse(ek_->domain().to_json());
  j["xi"] = to_vec(xi_);
  j["n_events"] = n_events_;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// KIE

FittedKIE::FittedKIE(PointPattern events, KernelParams params, Domain domain)
    : events_(std::move(events)), params_(std::move(params)),
      domain_(std::move(domain)) {
  if (events_.size() > 0 && events_.dim() != domain_.dim()) {
    throw DataError("events and domain dimension mismatch");
  }
}

double FittedKIE::nu(const Eigen::VectorXd& x) const {
  if (x.size() != domain_.dim()) throw DataError("point dimension mismatch");
  const double sqrt_pi = std::sqrt(M_PI);
  double total = 0.0;
  for (const auto& rect : domain_.rects()) {
    double prod = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double b = params_.beta[i];
      prod *= (sqrt_pi / (2.0 * b)) *
              (std::erf(b * (rect.hi[i] - x[i])) - std::erf(b * (rect.lo[i] - x[i])));
    }
    total += prod;
  }
  return total;
}

double FittedKIE::intensity(const Eigen::VectorXd& x, bool) const {
  if (events_.size() == 0) return 0.0;
  const Eigen::ArrayXXd diff =
      (events_.points().rowwise() - x.transpose()).array().rowwise() *
      params_.beta.transpose().array();
  const double num = (-diff.square().rowwise().sum()).exp().sum();
  return num / nu(x);
}

double FittedKIE::integral(const Domain& region, bool) const {
  if (events_.size() == 0) return 0.0;
  Rng rng(derive_seed(kKieMcSeed, 0));
  const PointPattern mc = region.sample_uniform(kKieMcPoints, rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < mc.size(); ++k) acc += intensity(mc.point(k));
  return acc / static_cast<double>(mc.size()) * region.measure();
}

FittedKIE fit_kie(const PointPattern& events, const KernelParams& params,
                  const Domain& domain) {
  return FittedKIE(events, params, domain);
}

std::string FittedKIE::to_json() const {
  json j;
  j["estimator"] = tag();
  j["beta"] = to_vec(params_.beta);
  j["domain"] = json::parse(domain_.to_json());
  j["events"] = pattern_to_json(events_);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// FIE

FittedFIE::FittedFIE(std::shared_ptr<const EquivalentKernel> ek,
                     Eigen::VectorXd alpha, PointPattern events)
    : ek_(std::move(ek)), alpha_(std::move(alpha)), events_(std::move(events)) {
  const Eigen::MatrixXd phi = ek_->map().features_matrix(events_.points());
  w_ = ek_->apply_B(phi.transpose() * alpha_);
}

double FittedFIE::latent(const Eigen::VectorXd& x) const {
  return ek_->map().features(x).dot(w_);
}

double FittedFIE::intensity(const Eigen::VectorXd& x, bool) const {
  const double f = latent(x);
  return f * f;
}

double FittedFIE::integral(const Domain& region, bool) const {
  // The fit domain's edge matrix is already cached in the kernel.
  if (&region == &ek_->domain()) return w_.dot(ek_->edge().A * w_);
  const Eigen::MatrixXd As = edge_matrix(ek_->map(), region).A;
  return w_.dot(As * w_);
}

double fie_objective(const Eigen::MatrixXd& psi, const Eigen::VectorXd& alpha,
                     double gamma) {
  const Eigen::VectorXd q = psi.transpose() * alpha;
  const Eigen::VectorXd u = psi * q;
  double obj = q.squaredNorm() / gamma;
  for (Eigen::Index n = 0; n < u.size(); ++n) {
    obj -= std::log(std::max(u[n], kLogFloor));
  }
  return obj;
}

namespace {

Eigen::VectorXd fie_gradient(const Eigen::MatrixXd& psi,
                             const Eigen::VectorXd& alpha, double gamma,
                             Eigen::VectorXd* u_out) {
  const Eigen::VectorXd q = psi.transpose() * alpha;
  const Eigen::VectorXd u = psi * q;
  Eigen::VectorXd inv_u(u.size());
  for (Eigen::Index n = 0; n < u.size(); ++n) {
    inv_u[n] = 1.0 / std::max(u[n], kLogFloor);
  }
  if (u_out) *u_out = u;
  return psi * ((2.0 / gamma) * q - psi.transpose() * inv_u);
}

}  // namespace

FittedFIE fit_fie(std::shared_ptr<const EquivalentKernel> ek,
                  const PointPattern& events, const OptimizerConfig& opt,
                  FIEFitInfo* info) {
  if (events.size() == 0) throw DataError("FIE requires at least one event");
  const double gamma = ek->gamma();
  const Eigen::Index N = static_cast<Eigen::Index>(events.size());
  const Eigen::MatrixXd psi = ek->psi_matrix(events.points());  // N x 2M

  // Constant init alpha = c 1 with c minimizing the objective along that ray;
  // keeps all log arguments positive when H 1 > 0.
  const Eigen::VectorXd q1 = psi.transpose() * Eigen::VectorXd::Ones(N);
  const double h_sum = q1.squaredNorm();
  double c = h_sum > 0.0
                 ? std::sqrt(static_cast<double>(N) * gamma / (2.0 * h_sum))
                 : 1.0;
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(N, c);

  double obj = fie_objective(psi, alpha, gamma);
  if (!std::isfinite(obj)) throw NumericError("FIE objective non-finite at init");

  Eigen::VectorXd m = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double scale = 1.0;
  double grad_norm = 0.0;
  int iter = 0;
  for (; iter < opt.max_iters; ++iter) {
    const Eigen::VectorXd g = fie_gradient(psi, alpha, gamma, nullptr);
    grad_norm = g.lpNorm<Eigen::Infinity>();
    if (grad_norm <= opt.tol) break;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g).eval();
    const double bc1 = 1.0 - std::pow(b1, iter + 1);
    const double bc2 = 1.0 - std::pow(b2, iter + 1);
    const Eigen::VectorXd dir =
        (m / bc1).array() / ((v / bc2).array().sqrt() + eps);
    // Backtrack on the Adam step so the monitored objective never increases.
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd cand = alpha - (opt.step * scale) * dir;
      const double cand_obj = fie_objective(psi, cand, gamma);
      if (std::isfinite(cand_obj) && cand_obj <= obj) {
        alpha = cand;
        obj = cand_obj;
        accepted = true;
        scale = std::min(1.0, scale * 2.0);
        break;
      }
      scale *= 0.5;
    }
    // If no step length along this direction decreases the objective, skip
    // the update and keep iterating: the moment estimates drift toward the
    // gradient, which is a descent direction, so progress resumes. Stopping
    // stays governed by the gradient tolerance and the iteration cap.
    if (!accepted) scale = 1.0;
  }
  if (!std::isfinite(obj)) throw NumericError("FIE objective diverged");
  if (info) {
    info->iterations = iter;
    info->objective = obj;
    info->grad_inf_norm = grad_norm;
  }
  return FittedFIE(std::move(ek), std::move(alpha), events);
}

FittedFIE fit_fie(const PointPattern& events, const KernelParams& params,
                  const Domain& domain, double gamma, int M, std::uint64_t seed,
                  const OptimizerConfig& opt, FIEFitInfo* info, bool qmc) {
  return fit_fie(make_ek(params, domain, gamma, M, seed, qmc), events, opt, info);
}

std::string FittedFIE::to_json() const {
  json j;
  j["estimator"] = tag();
  j["beta"] = to_vec(ek_->map().params().beta);
  j["gamma"] = ek_->gamma();
  j["M"] = ek_->map().half_count();
  j["seed"] = ek_->map().seed();
  j["qmc"] = ek_->map().qmc();
  j["domain"] = json::parse(ek_->domain().to_json());
  j["alpha"] = to_vec(alpha_);
  j["events"] = pattern_to_json(events_);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Serialization

std::unique_ptr<FittedModel> model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model JSON: ") + e.what());
  }
  const std::string tag = j.at("estimator").get<std::string>();
  Domain domain = Domain::from_json(j.at("domain").dump());
  KernelParams params(from_vec(j.at("beta").get<std::vector<double>>()));
  if (tag == "kie") {
    PointPattern events = pattern_from_json(j.at("events"), domain.dim());
    return std::make_unique<FittedKIE>(std::move(events), std::move(params),
                                       std::move(domain));
  }
  const double gamma = j.at("gamma").get<double>();
  const int M = j.at("M").get<int>();
  const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
  const bool qmc = j.value("qmc", true);
  auto ek = std::make_shared<EquivalentKernel>(
      build_feature_map(params, M, seed, qmc), domain, gamma);
  if (tag == "k2ie") {
    Eigen::VectorXd xi = from_vec(j.at("xi").get<std::vector<double>>());
    return std::make_unique<FittedK2IE>(std::move(ek), std::move(xi),
                                        j.at("n_events").get<std::size_t>());
  }
  if (tag == "fie") {
    Eigen::VectorXd alpha = from_vec(j.at("alpha").get<std::vector<double>>());
    PointPattern events = pattern_from_json(j.at("events"), domain.dim());
    return std::make_unique<FittedFIE>(std::move(ek), std::move(alpha),
                                       std::move(events));
  }
  throw DataError("unknown estimator tag: " + tag);
}

std::unique_ptr<FittedModel> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

void save_model(const FittedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << model.to_json() << "\n";
}

}  // namespace k2ie
