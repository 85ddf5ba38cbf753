#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "k2ie/rng.hpp"

namespace k2ie {

class PointPattern;

struct HyperRect {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  HyperRect() = default;
  HyperRect(Eigen::VectorXd lo_, Eigen::VectorXd hi_);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const { return (hi - lo).prod(); }
  bool contains(const Eigen::VectorXd& x) const;
};

// Observation window: a union of pairwise-disjoint axis-aligned boxes of a
// common dimension. Immutable after construction.
class Domain {
public:
  explicit Domain(std::vector<HyperRect> rects);

  int dim() const { return rects_[0].dim(); }
  const std::vector<HyperRect>& rects() const { return rects_; }
  std::size_t n_rects() const { return rects_.size(); }

  double measure() const { return measure_; }
  bool contains(const Eigen::VectorXd& x) const;
  // Index of the first rectangle containing x, or -1.
  int rect_index(const Eigen::VectorXd& x) const;

  // Axis-aligned bounding box of the union.
  HyperRect bounding_box() const;

  PointPattern sample_uniform(std::size_t n, Rng& rng) const;

  std::string to_json() const;
  static Domain from_json(const std::string& text);
  static Domain load(const std::string& path);
  void save(const std::string& path) const;

  // Single-box helpers for the common case.
  static Domain interval(double a, double b);
  static Domain box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

private:
  std::vector<HyperRect> rects_;
  double measure_ = 0.0;
};

// Evenly partitions a box into cells_per_axis^d congruent cells.
Domain partition_box(const HyperRect& box, int cells_per_axis);

}  // namespace k2ie
