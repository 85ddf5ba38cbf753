#include "k2ie/point_pattern.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "k2ie/errors.hpp"

namespace k2ie {

PointPattern PointPattern::concat(const PointPattern& other) const {
  if (dim() != other.dim() && size() != 0 && other.size() != 0) {
    throw DataError("cannot concatenate patterns of different dimension");
  }
  if (size() == 0) return other;
  if (other.size() == 0) return *this;
  Eigen::MatrixXd out(points_.rows() + other.points_.rows(), points_.cols());
  out << points_, other.points_;
  return PointPattern(std::move(out));
}

std::string PointPattern::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int i = 0; i < dim(); ++i) {
    if (i) out << ',';
    out << 'x' << (i + 1);
  }
  out << '\n';
  for (Eigen::Index r = 0; r < points_.rows(); ++r) {
    for (Eigen::Index c = 0; c < points_.cols(); ++c) {
      if (c) out << ',';
      out << points_(r, c);
    }
    out << '\n';
  }
  return out.str();
}

PointPattern PointPattern::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty events CSV");
  int dim = 1;
  for (char ch : line) {
    if (ch == ',') ++dim;
  }
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw DataError("invalid number in events CSV: " + cell);
      }
      ++cols;
    }
    if (cols != dim) throw DataError("ragged row in events CSV");
    ++rows;
  }
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows), dim);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) {
      pts(static_cast<Eigen::Index>(r), c) = values[r * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)];
    }
  }
  return PointPattern(std::move(pts));
}

PointPattern PointPattern::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open events file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str());
}

void PointPattern::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write events file: " + path);
  out << to_csv();
}

}  // namespace k2ie
