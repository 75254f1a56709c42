#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>

#include "ftkn/geometry/point_set.hpp"

namespace ftkn::memory {

inline constexpr std::size_t kDefaultWindow = 32;

/// What the bank keeps for one frame. `points` all carry that frame's ids;
/// `augmented` holds points borrowed from neighbouring frames, kept apart so the
/// per-frame identity invariant still holds.
struct FocalFrame {
  std::uint32_t frame_index = 0;
  geometry::PointSet points{1};
  geometry::PointSet augmented{1};
};

/// Thread-safe per-frame focal point bank with a sliding retention window.
/// Readers share a lock; a stored frame is immutable, so a fetch never sees a
/// partial write. With a spill directory, frames live on disk instead of memory.
class FocalStore {
 public:
  explicit FocalStore(std::size_t window = kDefaultWindow, std::optional<std::filesystem::path> spill_dir = {});

  /// Stores the frame's focal points (ids must be unique and belong to the frame),
  /// then evicts frames that fell out of the window behind the newest frame.
  /// Throws ConfigError if the frame is already stored.
  void store(std::uint32_t frame_index, geometry::PointSet points);
  /// Adds borrowed points to an already stored frame.
  void augment(std::uint32_t frame_index, const geometry::PointSet& extra);

  /// nullptr when the frame was never stored or has been evicted.
  std::shared_ptr<const FocalFrame> fetch(std::uint32_t frame_index) const;
  bool contains(std::uint32_t frame_index) const;

  std::size_t window() const { return window_; }
  std::size_t frame_count() const;
  /// Focal points currently held (own points plus augmented ones).
  std::size_t stored_points() const;
  /// Largest stored_points() seen after any store.
  std::size_t peak_stored_points() const;
  void clear();

 private:
  std::filesystem::path spill_path(std::uint32_t frame_index) const;
  std::shared_ptr<const FocalFrame> load_locked(std::uint32_t frame_index) const;
  void put_locked(std::shared_ptr<const FocalFrame> frame);
  void evict_locked();

  std::size_t window_;
  std::optional<std::filesystem::path> spill_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::uint32_t, std::shared_ptr<const FocalFrame>> frames_;  // empty pointers when spilled
  std::map<std::uint32_t, std::size_t> counts_;
  std::size_t stored_ = 0;
  std::size_t peak_ = 0;
};

/// Spill record: the scene-frame binary layout (points, zero boxes) followed by
/// an i64 id and f64 timestamp per point, then the same for augmented points.
void write_focal_frame(std::ostream& out, const FocalFrame& frame);
FocalFrame read_focal_frame(std::istream& in);

}  // namespace ftkn::memory
