#include "ftkn/geometry/scene_io.hpp"

#include <fstream>
#include <iomanip>

#include "ftkn/binary_io.hpp"
#include "ftkn/errors.hpp"

namespace ftkn::geometry {

void write_frame(std::ostream& out, const SceneFrame& frame) {
  const auto& pts = frame.points;
  if (pts.extra_dim != 1) throw DimensionError("scene frames carry exactly one extra channel");
  binary::put<std::uint32_t>(out, frame.frame_index);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    binary::put(out, pts.coords[i].x);
    binary::put(out, pts.coords[i].y);
    binary::put(out, pts.coords[i].z);
    binary::put(out, pts.extras[i]);
  }
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(frame.boxes.size()));
  for (const auto& b : frame.boxes) {
    const auto v = b.velocity_or_zero();
    for (double x : {b.center.x, b.center.y, b.center.z, b.size.x, b.size.y, b.size.z, b.yaw, v.vx, v.vy})
      binary::put(out, x);
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(b.class_id));
  }
}

SceneFrame read_frame(std::istream& in) {
  SceneFrame f;
  f.frame_index = binary::get<std::uint32_t>(in);
  const auto n = binary::get<std::uint32_t>(in);
  f.points.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Vec3 p{binary::get<double>(in), binary::get<double>(in), binary::get<double>(in)};
    double intensity = binary::get<double>(in);
    f.points.push_back(p, {&intensity, 1}, 0.0, make_point_id(f.frame_index, i));
  }
  const auto nb = binary::get<std::uint32_t>(in);
  f.boxes.reserve(nb);
  for (std::uint32_t i = 0; i < nb; ++i) {
    double v[9];
    for (auto& x : v) x = binary::get<double>(in);
    const auto cls = binary::get<std::uint32_t>(in);
    f.boxes.push_back(Box7::make({v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6], Velocity{v[7], v[8]}, 1.0,
                                 static_cast<int>(cls)));
  }
  return f;
}

void write_frames(std::ostream& out, const std::vector<SceneFrame>& frames) {
  for (const auto& f : frames) write_frame(out, f);
}

std::vector<SceneFrame> read_frames(std::istream& in) {
  std::vector<SceneFrame> frames;
  while (!binary::at_end(in)) frames.push_back(read_frame(in));
  return frames;
}

void save_frames(const std::filesystem::path& path, const std::vector<SceneFrame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_frames(out, frames);
}

std::vector<SceneFrame> load_frames(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  return read_frames(in);
}

void write_frames_text(std::ostream& out, const std::vector<SceneFrame>& frames) {
  out << std::setprecision(17);
  for (const auto& f : frames) {
    out << "frame " << f.frame_index << '\n';
    for (std::size_t i = 0; i < f.points.size(); ++i) {
      const auto& p = f.points.coords[i];
      out << "p " << p.x << ' ' << p.y << ' ' << p.z << ' ' << f.points.extras[i] << '\n';
    }
    for (const auto& b : f.boxes) {
      const auto v = b.velocity_or_zero();
      out << "b " << b.center.x << ' ' << b.center.y << ' ' << b.center.z << ' ' << b.size.x << ' ' << b.size.y
          << ' ' << b.size.z << ' ' << b.yaw << ' ' << v.vx << ' ' << v.vy << ' ' << b.class_id << '\n';
    }
  }
}

}  // namespace ftkn::geometry
