#include "wopt/sample_cloud.hpp"

#include <algorithm>
#include <numeric>

#include "wopt/errors.hpp"

namespace wopt {

namespace {

// Lexicographic order on rows of a flat point array.
bool row_less(const std::vector<double>& flat, std::size_t dim, std::size_t a, std::size_t b) {
  return std::lexicographical_compare(flat.begin() + a * dim, flat.begin() + (a + 1) * dim,
                                      flat.begin() + b * dim, flat.begin() + (b + 1) * dim);
}

bool row_equal(const std::vector<double>& flat, std::size_t dim, std::size_t a, std::size_t b) {
  return std::equal(flat.begin() + a * dim, flat.begin() + (a + 1) * dim,
                    flat.begin() + b * dim);
}

} // namespace

SampleCloud::SampleCloud(std::vector<double> flat_points, std::size_t dim)
    : points_(std::move(flat_points)), dim_(dim) {
  if (dim_ == 0) throw domain_error("SampleCloud: dimension must be >= 1");
  if (points_.empty() || points_.size() % dim_ != 0)
    throw domain_error("SampleCloud: point data size is not a multiple of the dimension");
  n_ = points_.size() / dim_;
  for (double v : points_)
    if (!std::isfinite(v)) throw domain_error("SampleCloud: non-finite coordinate");

  // Group coordinate-identical points; groups are ordered by first occurrence.
  std::vector<std::size_t> idx(n_);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return row_less(points_, dim_, a, b);
  });
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t s = 0; s < n_;) {
    std::size_t e = s + 1;
    while (e < n_ && row_equal(points_, dim_, idx[s], idx[e])) ++e;
    std::vector<std::size_t> g(idx.begin() + s, idx.begin() + e);
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
    s = e;
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  duplicate_groups_ = std::move(groups);
}

SampleCloud SampleCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw domain_error("SampleCloud: need at least one point");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw domain_error("SampleCloud: ragged point rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return SampleCloud(std::move(flat), dim);
}

SampleCloud SampleCloud::merged() const {
  if (!has_duplicates()) return *this;
  std::vector<double> flat;
  flat.reserve(duplicate_groups_.size() * dim_);
  for (const auto& g : duplicate_groups_) {
    const PointRef p = point(g.front());
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return SampleCloud(std::move(flat), dim_);
}

} // namespace wopt
