#include "ftkn/memory/focal_store.hpp"

#include <fstream>
#include <mutex>
#include <unordered_set>

#include "ftkn/binary_io.hpp"
#include "ftkn/errors.hpp"
#include "ftkn/geometry/scene_io.hpp"

namespace ftkn::memory {

namespace {

void write_points(std::ostream& out, std::uint32_t frame_index, const geometry::PointSet& pts) {
  geometry::SceneFrame rec;
  rec.frame_index = frame_index;
  rec.points = pts;
  geometry::write_frame(out, rec);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    binary::put<std::int64_t>(out, pts.ids[i]);
    binary::put(out, pts.timestamps[i]);
  }
}

geometry::SceneFrame read_points(std::istream& in) {
  auto rec = geometry::read_frame(in);
  auto& pts = rec.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts.ids[i] = binary::get<std::int64_t>(in);
    pts.timestamps[i] = binary::get<double>(in);
  }
  return rec;
}

void check_frame_points(std::uint32_t frame_index, const geometry::PointSet& pts) {
  pts.check();
  std::unordered_set<PointId> seen;
  for (auto id : pts.ids) {
    if (id == kPadId) throw ConfigError("focal points may not contain padding");
    if (point_frame(id) != frame_index) throw ConfigError("focal point id belongs to another frame");
    if (!seen.insert(id).second) throw ConfigError("duplicate focal point id");
  }
}

std::size_t point_count(const FocalFrame& f) { return f.points.size() + f.augmented.size(); }

}  // namespace

void write_focal_frame(std::ostream& out, const FocalFrame& frame) {
  write_points(out, frame.frame_index, frame.points);
  write_points(out, frame.frame_index, frame.augmented);
}

FocalFrame read_focal_frame(std::istream& in) {
  FocalFrame f;
  auto own = read_points(in);
  f.frame_index = own.frame_index;
  f.points = std::move(own.points);
  f.augmented = std::move(read_points(in).points);
  return f;
}

FocalStore::FocalStore(std::size_t window, std::optional<std::filesystem::path> spill_dir)
    : window_(window), spill_dir_(std::move(spill_dir)) {
  if (window_ == 0) throw ConfigError("focal store window must be at least one frame");
  if (spill_dir_) std::filesystem::create_directories(*spill_dir_);
}

std::filesystem::path FocalStore::spill_path(std::uint32_t frame_index) const {
  return *spill_dir_ / ("focal_" + std::to_string(frame_index) + ".bin");
}

void FocalStore::put_locked(std::shared_ptr<const FocalFrame> frame) {
  const auto idx = frame->frame_index;
  const std::size_t n = point_count(*frame);
  if (spill_dir_) {
    std::ofstream out(spill_path(idx), std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write spill file for frame " + std::to_string(idx));
    write_focal_frame(out, *frame);
    frame.reset();
  }
  auto it = counts_.find(idx);
  if (it != counts_.end()) stored_ -= it->second;
  counts_[idx] = n;
  stored_ += n;
  frames_[idx] = std::move(frame);
}

void FocalStore::store(std::uint32_t frame_index, geometry::PointSet points) {
  check_frame_points(frame_index, points);
  auto frame = std::make_shared<FocalFrame>();
  frame->frame_index = frame_index;
  frame->augmented = geometry::PointSet(points.extra_dim);
  frame->points = std::move(points);
  std::unique_lock lock(mutex_);
  if (frames_.count(frame_index)) throw ConfigError("frame " + std::to_string(frame_index) + " already stored");
  put_locked(std::move(frame));
  evict_locked();
  peak_ = std::max(peak_, stored_);
}

void FocalStore::augment(std::uint32_t frame_index, const geometry::PointSet& extra) {
  extra.check();
  std::unique_lock lock(mutex_);
  auto current = load_locked(frame_index);
  if (!current) throw ConfigError("cannot augment unstored frame " + std::to_string(frame_index));
  auto next = std::make_shared<FocalFrame>(*current);
  if (extra.extra_dim != next->augmented.extra_dim) throw DimensionError("augmented points extra width");
  for (std::size_t i = 0; i < extra.size(); ++i) next->augmented.push_row(extra, i);
  put_locked(std::move(next));
  peak_ = std::max(peak_, stored_);
}

void FocalStore::evict_locked() {
  if (frames_.empty()) return;
  const std::uint32_t newest = frames_.rbegin()->first;
  while (!frames_.empty() && newest - frames_.begin()->first >= window_) {
    const auto idx = frames_.begin()->first;
    if (spill_dir_) std::filesystem::remove(spill_path(idx));
    stored_ -= counts_[idx];
    counts_.erase(idx);
    frames_.erase(frames_.begin());
  }
}

std::shared_ptr<const FocalFrame> FocalStore::fetch(std::uint32_t frame_index) const {
  std::shared_lock lock(mutex_);
  return load_locked(frame_index);
}

std::shared_ptr<const FocalFrame> FocalStore::load_locked(std::uint32_t frame_index) const {
  auto it = frames_.find(frame_index);
  if (it == frames_.end()) return nullptr;
  if (!spill_dir_) return it->second;
  std::ifstream in(spill_path(frame_index), std::ios::binary);
  if (!in) throw FormatError("missing spill file for frame " + std::to_string(frame_index));
  return std::make_shared<FocalFrame>(read_focal_frame(in));
}

bool FocalStore::contains(std::uint32_t frame_index) const {
  std::shared_lock lock(mutex_);
  return frames_.count(frame_index) > 0;
}

std::size_t FocalStore::frame_count() const {
  std::shared_lock lock(mutex_);
  return frames_.size();
}

std::size_t FocalStore::stored_points() const {
  std::shared_lock lock(mutex_);
  return stored_;
}

std::size_t FocalStore::peak_stored_points() const {
  std::shared_lock lock(mutex_);
  return peak_;
}

void FocalStore::clear() {
  std::unique_lock lock(mutex_);
  if (spill_dir_)
    for (const auto& [idx, f] : frames_) std::filesystem::remove(spill_path(idx));
  frames_.clear();
  counts_.clear();
  stored_ = 0;
}

}  // namespace ftkn::memory
