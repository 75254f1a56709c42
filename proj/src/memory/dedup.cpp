#include "ftkn/memory/dedup.hpp"

#include <algorithm>
#include <unordered_map>

#include "ftkn/errors.hpp"

namespace ftkn::memory {

UniquePoints assign_unique_ids(const std::vector<geometry::PointSet>& samples) {
  const std::size_t extra_dim = samples.empty() ? 1 : samples.front().extra_dim;
  // first occurrence of each id: (sample, row)
  std::unordered_map<PointId, std::pair<std::size_t, std::size_t>> first;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& ps = samples[s];
    ps.check();
    if (ps.extra_dim != extra_dim) throw DimensionError("samples disagree on extra width");
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (ps.ids[i] != kPadId) first.try_emplace(ps.ids[i], s, i);
  }

  std::vector<PointId> ids;
  ids.reserve(first.size());
  for (const auto& [id, where] : first) ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  UniquePoints out{geometry::PointSet(extra_dim), {}};
  out.points.reserve(ids.size());
  std::unordered_map<PointId, RowIndex> row_of;
  row_of.reserve(ids.size());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto [s, i] = first.at(ids[r]);
    out.points.push_row(samples[s], i);
    row_of.emplace(ids[r], static_cast<RowIndex>(r));
  }

  out.index.reserve(samples.size());
  for (const auto& ps : samples) {
    std::vector<RowIndex> rows(ps.size(), kNoRow);
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (ps.ids[i] != kPadId) rows[i] = row_of.at(ps.ids[i]);
    out.index.push_back(std::move(rows));
  }
  return out;
}

geometry::PointSet finalize_focal(const IndexMatrix& selected, const geometry::PointSet& points) {
  std::vector<RowIndex> rows;
  for (const auto& r : selected)
    for (auto i : r) {
      if (i == kNoRow) continue;
      if (i < 0 || static_cast<std::size_t>(i) >= points.size()) throw DimensionError("focal index out of range");
      rows.push_back(i);
    }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  geometry::PointSet out(points.extra_dim);
  out.reserve(rows.size());
  for (auto r : rows) out.push_row(points, static_cast<std::size_t>(r));
  return out;
}

}  // namespace ftkn::memory
