#pragma once

#include <span>
#include <vector>

#include "ftkn/types.hpp"

namespace ftkn::geometry {

/// Points with per-point extra features (row-major N x extra_dim), relative
/// timestamps and stable ids. N may be 0.
struct PointSet {
  std::vector<Vec3> coords;
  std::vector<double> extras;
  std::size_t extra_dim = 1;
  std::vector<double> timestamps;
  std::vector<PointId> ids;

  explicit PointSet(std::size_t extra_dim = 1) : extra_dim(extra_dim) {}

  std::size_t size() const { return coords.size(); }
  bool empty() const { return coords.empty(); }
  std::span<const double> extra(std::size_t i) const { return {extras.data() + i * extra_dim, extra_dim}; }
  void reserve(std::size_t n);
  void push_back(Vec3 p, std::span<const double> extra, double timestamp, PointId id);
  /// Appends row i of another set with the same extra_dim.
  void push_row(const PointSet& other, std::size_t i);
  /// A zero row with the padding id.
  void push_padding();
  /// Throws DimensionError if the parallel arrays disagree.
  void check() const;
};

}  // namespace ftkn::geometry
