#pragma once

#include <cstdint>
#include <vector>

#include "ftkn/geometry/point_set.hpp"

namespace ftkn::memory {

/// Row index into a deduplicated point set; -1 marks padding.
using RowIndex = std::int64_t;
inline constexpr RowIndex kNoRow = -1;
using IndexMatrix = std::vector<std::vector<RowIndex>>;

struct UniquePoints {
  geometry::PointSet points;  // one row per distinct point id, ascending id
  IndexMatrix index;          // per proposal, per sample slot
};

/// Merges per-proposal samples so every physical point appears once. Padding rows
/// map to kNoRow. All samples must share one extra width.
UniquePoints assign_unique_ids(const std::vector<geometry::PointSet>& samples);

/// Rows of `points` referenced anywhere in `selected`, each once, ascending row order.
geometry::PointSet finalize_focal(const IndexMatrix& selected, const geometry::PointSet& points);

}  // namespace ftkn::memory
