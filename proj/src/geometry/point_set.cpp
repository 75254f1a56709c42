#include "ftkn/geometry/point_set.hpp"

#include <string>

#include "ftkn/errors.hpp"

namespace ftkn::geometry {

void PointSet::reserve(std::size_t n) {
  coords.reserve(n);
  extras.reserve(n * extra_dim);
  timestamps.reserve(n);
  ids.reserve(n);
}

void PointSet::push_back(Vec3 p, std::span<const double> extra, double timestamp, PointId id) {
  if (extra.size() != extra_dim) throw DimensionError("point extra width " + std::to_string(extra.size()));
  coords.push_back(p);
  extras.insert(extras.end(), extra.begin(), extra.end());
  timestamps.push_back(timestamp);
  ids.push_back(id);
}

void PointSet::push_row(const PointSet& other, std::size_t i) {
  push_back(other.coords[i], other.extra(i), other.timestamps[i], other.ids[i]);
}

void PointSet::push_padding() {
  coords.push_back({});
  extras.insert(extras.end(), extra_dim, 0.0);
  timestamps.push_back(0.0);
  ids.push_back(kPadId);
}

void PointSet::check() const {
  const auto n = coords.size();
  if (extras.size() != n * extra_dim || timestamps.size() != n || ids.size() != n)
    throw DimensionError("point set arrays disagree on length");
}

}  // namespace ftkn::geometry
