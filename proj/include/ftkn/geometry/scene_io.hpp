#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ftkn/geometry/box.hpp"
#include "ftkn/geometry/point_set.hpp"

namespace ftkn::geometry {

/// One lidar sweep with its boxes. Points carry one extra channel (intensity).
struct SceneFrame {
  std::uint32_t frame_index = 0;
  PointSet points{1};
  std::vector<Box7> boxes;
};

// Binary record, little-endian, records back to back:
//   frame index u32 | point count u32 | (x, y, z, intensity) f64 x 4 per point
//   | box count u32 | (x, y, z, l, w, h, yaw, vx, vy) f64 x 9 + class u32 per box
// Point ids are implicit: make_point_id(frame index, row). Timestamps are not stored.

void write_frame(std::ostream& out, const SceneFrame& frame);
/// Reads one record; the stream must not be at its end.
SceneFrame read_frame(std::istream& in);

void write_frames(std::ostream& out, const std::vector<SceneFrame>& frames);
std::vector<SceneFrame> read_frames(std::istream& in);

void save_frames(const std::filesystem::path& path, const std::vector<SceneFrame>& frames);
std::vector<SceneFrame> load_frames(const std::filesystem::path& path);

/// Line-oriented debugging dump: "frame <i>", then "p x y z intensity" and
/// "b x y z l w h yaw vx vy class" lines.
void write_frames_text(std::ostream& out, const std::vector<SceneFrame>& frames);

}  // namespace ftkn::geometry
