#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wopt {

using PointRef = std::span<const double>;

inline double squared_distance(PointRef a, PointRef b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double t = a[c] - b[c];
    s += t * t;
  }
  return s;
}

inline double distance(PointRef a, PointRef b) {
  return std::sqrt(squared_distance(a, b));
}

// Flat row-major point array with a fixed ambient dimension.
struct PointArray {
  std::vector<double> data;
  std::size_t dim = 1;

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
  PointRef operator[](std::size_t i) const { return {data.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
  void append(PointRef p) { data.insert(data.end(), p.begin(), p.end()); }
};

} // namespace wopt
