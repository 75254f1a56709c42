#include "ftkn/types.hpp"

#include <string>

#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"

namespace ftkn {

bool TokenSequence::all_padding() const { return valid_count() == 0; }

std::size_t TokenSequence::valid_count() const {
  std::size_t n = 0;
  for (auto id : point_ids) n += id != kPadId;
  return n;
}

std::vector<bool> TokenSequence::valid_mask() const {
  std::vector<bool> mask(point_ids.size());
  for (std::size_t i = 0; i < point_ids.size(); ++i) mask[i] = point_ids[i] != kPadId;
  return mask;
}

TokenSequence TokenSequence::select(std::span<const std::size_t> rows) const {
  TokenSequence out;
  out.features = nn::gather_rows(features, rows);
  out.point_ids.reserve(rows.size());
  out.positions.reserve(rows.size());
  for (auto r : rows) {
    out.point_ids.push_back(point_ids.at(r));
    out.positions.push_back(positions.at(r));
  }
  out.frame_index = frame_index;
  return out;
}

void TokenSequence::check() const {
  if (features.rows() != point_ids.size() || positions.size() != point_ids.size())
    throw DimensionError("token sequence has " + std::to_string(features.rows()) + " feature rows, " +
                         std::to_string(point_ids.size()) + " ids, " + std::to_string(positions.size()) +
                         " positions");
}

}  // namespace ftkn
