#include "ftkn/geometry/embed.hpp"

#include "ftkn/nn/ops.hpp"

namespace ftkn::geometry {

namespace {

void write_offsets(std::vector<double>& out, std::size_t row, std::size_t width, Vec3 p,
                   const std::array<Vec3, 9>& keypoints) {
  double* dst = out.data() + row * width;
  for (std::size_t j = 0; j < 9; ++j) {
    const Vec3 d = p - keypoints[j];
    dst[3 * j + 0] = d.x;
    dst[3 * j + 1] = d.y;
    dst[3 * j + 2] = d.z;
  }
}

TokenSequence embed_rows(const PointSet& points, const nn::Tensor& raw, const Embedder& mlp, int frame_index) {
  std::vector<bool> valid(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) valid[i] = points.ids[i] != kPadId;
  TokenSequence seq;
  seq.features = nn::mask_rows(mlp(raw), valid);
  seq.point_ids = points.ids;
  seq.positions = points.coords;
  seq.frame_index = frame_index;
  return seq;
}

}  // namespace

nn::Tensor geometry_features(const PointSet& sample, const Box7& box) {
  sample.check();
  const auto kp = box_keypoints(box);
  const std::size_t width = kOffsetFeatures + sample.extra_dim;
  std::vector<double> raw(sample.size() * width, 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.ids[i] == kPadId) continue;
    write_offsets(raw, i, width, sample.coords[i], kp);
    auto extra = sample.extra(i);
    std::copy(extra.begin(), extra.end(), raw.begin() + static_cast<std::ptrdiff_t>(i * width + kOffsetFeatures));
  }
  return nn::Tensor::from({sample.size(), width}, std::move(raw));
}

nn::Tensor motion_features(const PointSet& hist, const Box7& current_box) {
  hist.check();
  const auto kp = box_keypoints(current_box);
  const std::size_t width = kOffsetFeatures + 1;
  std::vector<double> raw(hist.size() * width, 0.0);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist.ids[i] == kPadId) continue;
    write_offsets(raw, i, width, hist.coords[i], kp);
    raw[i * width + kOffsetFeatures] = hist.timestamps[i];
  }
  return nn::Tensor::from({hist.size(), width}, std::move(raw));
}

TokenSequence geometry_embed(const PointSet& sample, const Box7& box, const Embedder& mlp, int frame_index) {
  return embed_rows(sample, geometry_features(sample, box), mlp, frame_index);
}

TokenSequence motion_embed(const PointSet& hist, const Box7& current_box, const Embedder& mlp, int frame_index) {
  return embed_rows(hist, motion_features(hist, current_box), mlp, frame_index);
}

}  // namespace ftkn::geometry
