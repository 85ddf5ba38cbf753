#pragma once

#include <Eigen/Core>
#include <string>

namespace k2ie {

// A finite set of d-dimensional event locations, stored row-wise.
class PointPattern {
public:
  PointPattern() = default;
  explicit PointPattern(Eigen::MatrixXd points) : points_(std::move(points)) {}
  static PointPattern empty(int dim) { return PointPattern(Eigen::MatrixXd(0, dim)); }

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::VectorXd point(std::size_t n) const { return points_.row(static_cast<Eigen::Index>(n)); }

  PointPattern concat(const PointPattern& other) const;

  // CSV with header "x1,...,xd", one row per event.
  std::string to_csv() const;
  static PointPattern from_csv(const std::string& text);
  static PointPattern load(const std::string& path);
  void save(const std::string& path) const;

private:
  Eigen::MatrixXd points_;
};

}  // namespace k2ie
