#include "k2ie/domain.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "k2ie/errors.hpp"
#include "k2ie/point_pattern.hpp"

namespace k2ie {

using json = nlohmann::json;

HyperRect::HyperRect(Eigen::VectorXd lo_, Eigen::VectorXd hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw DataError("hyper-rectangle bounds must share a nonzero dimension");
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) {
      throw DataError("hyper-rectangle requires lo < hi on every axis");
    }
  }
}

bool HyperRect::contains(const Eigen::VectorXd& x) const {
  if (x.size() != lo.size()) throw DataError("point dimension mismatch");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

namespace {

bool interiors_overlap(const HyperRect& a, const HyperRect& b) {
  for (Eigen::Index i = 0; i < a.lo.size(); ++i) {
    if (a.hi[i] <= b.lo[i] || b.hi[i] <= a.lo[i]) return false;
  }
  return true;
}

}  // namespace

Domain::Domain(std::vector<HyperRect> rects) : rects_(std::move(rects)) {
  if (rects_.empty()) throw DataError("domain requires at least one rectangle");
  const int d = rects_[0].dim();
  for (const auto& r : rects_) {
    if (r.dim() != d) throw DataError("domain rectangles must share dimension");
  }
  for (std::size_t a = 0; a < rects_.size(); ++a) {
    for (std::size_t b = a + 1; b < rects_.size(); ++b) {
      if (interiors_overlap(rects_[a], rects_[b])) {
        throw DataError("domain rectangles must be pairwise disjoint");
      }
    }
  }
  measure_ = 0.0;
  for (const auto& r : rects_) measure_ += r.volume();
}

bool Domain::contains(const Eigen::VectorXd& x) const {
  return rect_index(x) >= 0;
}

int Domain::rect_index(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DataError("point dimension mismatch");
  for (std::size_t j = 0; j < rects_.size(); ++j) {
    if (rects_[j].contains(x)) return static_cast<int>(j);
  }
  return -1;
}

HyperRect Domain::bounding_box() const {
  Eigen::VectorXd lo = rects_[0].lo;
  Eigen::VectorXd hi = rects_[0].hi;
  for (const auto& r : rects_) {
    lo = lo.cwiseMin(r.lo);
    hi = hi.cwiseMax(r.hi);
  }
  return HyperRect(lo, hi);
}

PointPattern Domain::sample_uniform(std::size_t n, Rng& rng) const {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), dim());
  std::vector<double> cum;
  cum.reserve(rects_.size());
  double acc = 0.0;
  for (const auto& r : rects_) {
    acc += r.volume();
    cum.push_back(acc);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = unit(rng) * measure_;
    std::size_t j = 0;
    while (j + 1 < cum.size() && u > cum[j]) ++j;
    const auto& r = rects_[j];
    for (int i = 0; i < dim(); ++i) {
      pts(static_cast<Eigen::Index>(k), i) =
          r.lo[i] + unit(rng) * (r.hi[i] - r.lo[i]);
    }
  }
  return PointPattern(std::move(pts));
}

std::string Domain::to_json() const {
  json j;
  j["dim"] = dim();
  j["rects"] = json::array();
  for (const auto& r : rects_) {
    json jr;
    jr["lo"] = std::vector<double>(r.lo.data(), r.lo.data() + r.lo.size());
    jr["hi"] = std::vector<double>(r.hi.data(), r.hi.data() + r.hi.size());
    j["rects"].push_back(jr);
  }
  return j.dump(2);
}

Domain Domain::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid domain JSON: ") + e.what());
  }
  if (!j.contains("rects") || !j["rects"].is_array() || j["rects"].empty()) {
    throw DataError("domain JSON requires a non-empty 'rects' array");
  }
  std::vector<HyperRect> rects;
  for (const auto& jr : j["rects"]) {
    std::vector<double> lo = jr.at("lo").get<std::vector<double>>();
    std::vector<double> hi = jr.at("hi").get<std::vector<double>>();
    rects.emplace_back(
        Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
        Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
  }
  Domain d(std::move(rects));
  if (j.contains("dim") && j["dim"].get<int>() != d.dim()) {
    throw DataError("domain JSON 'dim' disagrees with rectangle dimensions");
  }
  return d;
}

Domain Domain::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open domain file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void Domain::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write domain file: " + path);
  out << to_json() << "\n";
}

Domain Domain::interval(double a, double b) {
  Eigen::VectorXd lo(1), hi(1);
  lo << a;
  hi << b;
  return Domain({HyperRect(lo, hi)});
}

Domain Domain::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return Domain({HyperRect(lo, hi)});
}

Domain partition_box(const HyperRect& box, int cells_per_axis) {
  if (cells_per_axis < 1) throw ConfigError("cells_per_axis must be >= 1");
  const int d = box.dim();
  std::vector<HyperRect> cells;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  const Eigen::VectorXd step = (box.hi - box.lo) / cells_per_axis;
  while (true) {
    Eigen::VectorXd lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = box.lo[i] + idx[static_cast<std::size_t>(i)] * step[i];
      hi[i] = (idx[static_cast<std::size_t>(i)] == cells_per_axis - 1)
                  ? box.hi[i]
                  : box.lo[i] + (idx[static_cast<std::size_t>(i)] + 1) * step[i];
    }
    cells.emplace_back(lo, hi);
    int axis = 0;
    while (axis < d) {
      if (++idx[static_cast<std::size_t>(axis)] < cells_per_axis) break;
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
  return Domain(std::move(cells));
}

}  // namespace k2ie
