#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wopt/geometry.hpp"

namespace wopt {

// The dataset X_1..X_n in R^d together with its exact-duplicate structure.
// Points are stored as given; `duplicate_groups` partitions {0..n-1} into
// groups of coordinate-identical points, and `merged()` produces the cloud of
// distinct points that every geometric construction operates on.
class SampleCloud {
public:
  SampleCloud(std::vector<double> flat_points, std::size_t dim);

  static SampleCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  PointRef point(std::size_t i) const { return {points_.data() + i * dim_, dim_}; }
  const std::vector<double>& flat() const { return points_; }

  const std::vector<std::vector<std::size_t>>& duplicate_groups() const {
    return duplicate_groups_;
  }
  bool has_duplicates() const { return duplicate_groups_.size() != n_; }

  // Distinct points, ordered by first occurrence.
  SampleCloud merged() const;

private:
  std::vector<double> points_;
  std::size_t n_ = 0;
  std::size_t dim_ = 1;
  std::vector<std::vector<std::size_t>> duplicate_groups_;
};

} // namespace wopt
