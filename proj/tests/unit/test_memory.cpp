#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include "../support/oracles.hpp"
#include "ftkn/errors.hpp"
#include "ftkn/memory/dedup.hpp"
#include "ftkn/memory/focal_store.hpp"

using namespace ftkn;
using namespace ftkn::memory;
using geometry::PointSet;

namespace {

PointSet frame_points(std::uint32_t frame, const std::vector<std::uint32_t>& rows, std::size_t pads = 0) {
  PointSet s(1);
  for (auto r : rows) {
    double e = 0.01 * r;
    s.push_back({double(r), 2.0 * r, -0.5 * r}, {&e, 1}, -0.1 * frame, make_point_id(frame, r));
  }
  for (std::size_t i = 0; i < pads; ++i) s.push_padding();
  return s;
}

}  // namespace

TEST_CASE("assign_unique_ids: shared points appear once and are referenced twice") {
  auto u = assign_unique_ids({frame_points(0, {1, 3, 5}), frame_points(0, {3, 5, 8}, 1)});
  CHECK(u.points.size() == 4);
  CHECK(u.points.ids == std::vector<PointId>{make_point_id(0, 1), make_point_id(0, 3), make_point_id(0, 5),
                                             make_point_id(0, 8)});
  CHECK(u.index[0] == std::vector<RowIndex>{0, 1, 2});
  CHECK(u.index[1] == std::vector<RowIndex>{1, 2, 3, kNoRow});
}

TEST_CASE("assign_unique_ids: disjoint proposals keep every point") {
  auto u = assign_unique_ids({frame_points(1, {0, 1}), frame_points(1, {2, 3, 4}), frame_points(1, {})});
  CHECK(u.points.size() == 5);
  CHECK(u.index[2].empty());
}

TEST_CASE("assign_unique_ids and finalize_focal: random overlaps match a hash-set oracle") {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    std::vector<PointSet> samples;
    std::vector<PointId> all;
    const std::size_t m = 1 + rng.index(8);
    for (std::size_t p = 0; p < m; ++p) {
      auto rows = rng.sample_without_replacement(60, 1 + rng.index(20));
      std::vector<std::uint32_t> r32(rows.begin(), rows.end());
      auto s = frame_points(4, r32, rng.index(3));
      all.insert(all.end(), s.ids.begin(), s.ids.end());
      samples.push_back(s);
    }
    auto u = assign_unique_ids(samples);
    CHECK(u.points.size() == testing::distinct_count(all, kPadId));
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t i = 0; i < samples[p].size(); ++i) {
        if (samples[p].ids[i] == kPadId) {
          CHECK(u.index[p][i] == kNoRow);
        } else {
          const auto row = static_cast<std::size_t>(u.index[p][i]);
          CHECK(u.points.ids[row] == samples[p].ids[i]);
          CHECK(u.points.coords[row] == samples[p].coords[i]);
        }
      }

    // keep a random subset of each proposal's references
    IndexMatrix chosen;
    std::vector<PointId> chosen_ids;
    for (const auto& r : u.index) {
      std::vector<RowIndex> pick;
      for (auto i : r)
        if (rng.bernoulli(0.4)) {
          pick.push_back(i);
          chosen_ids.push_back(i == kNoRow ? kPadId : u.points.ids[static_cast<std::size_t>(i)]);
        }
      chosen.push_back(pick);
    }
    auto focal = finalize_focal(chosen, u.points);
    CHECK(focal.size() == testing::distinct_count(chosen_ids, kPadId));
    CHECK(focal.size() <= u.points.size());
    std::set<PointId> pool(u.points.ids.begin(), u.points.ids.end());
    for (auto id : focal.ids) CHECK(pool.count(id) == 1);
    CHECK(std::is_sorted(focal.ids.begin(), focal.ids.end()));
  }
}

TEST_CASE("finalize_focal: single proposal and identical selections") {
  auto p = frame_points(2, {0, 1, 2, 3, 4, 5});
  auto one = finalize_focal({{4, 1, 2}}, p);
  CHECK(one.ids == std::vector<PointId>{make_point_id(2, 1), make_point_id(2, 2), make_point_id(2, 4)});
  IndexMatrix same(10, std::vector<RowIndex>{0, 3, 5, kNoRow});
  CHECK(finalize_focal(same, p).size() == 3);
  CHECK_THROWS_AS(finalize_focal({{9}}, p), DimensionError);
}

TEST_CASE("FocalStore: round trip, absence and validation") {
  FocalStore store(4);
  auto pts = frame_points(3, {2, 7, 9});
  store.store(3, pts);
  auto f = store.fetch(3);
  REQUIRE(f);
  CHECK(f->points.ids == pts.ids);
  CHECK(f->points.coords == pts.coords);
  CHECK(f->points.extras == pts.extras);
  CHECK(f->points.timestamps == pts.timestamps);
  CHECK(store.fetch(2) == nullptr);
  CHECK_THROWS_AS(store.store(3, pts), ConfigError);
  CHECK_THROWS_AS(store.store(5, pts), ConfigError);  // ids from frame 3
  auto dup = frame_points(6, {1, 1});
  CHECK_THROWS_AS(store.store(6, dup), ConfigError);
}

TEST_CASE("FocalStore: frames leave the window behind the newest frame") {
  FocalStore store(3);
  for (std::uint32_t f = 0; f < 6; ++f) store.store(f, frame_points(f, {f, f + 1}));
  CHECK(store.frame_count() == 3);
  CHECK(store.fetch(2) == nullptr);
  CHECK(store.fetch(3) != nullptr);
  CHECK(store.fetch(5) != nullptr);
  CHECK(store.stored_points() == 6);
  CHECK(store.peak_stored_points() == 6);
}

TEST_CASE("FocalStore: augmented points are kept apart from the frame's own points") {
  FocalStore store(8);
  store.store(4, frame_points(4, {0, 1}));
  store.augment(4, frame_points(3, {10, 11, 12}));
  auto f = store.fetch(4);
  REQUIRE(f);
  CHECK(f->points.size() == 2);
  CHECK(f->augmented.size() == 3);
  for (auto id : f->points.ids) CHECK(point_frame(id) == 4);
  CHECK(store.stored_points() == 5);
  CHECK_THROWS_AS(store.augment(9, frame_points(3, {1})), ConfigError);
}

TEST_CASE("FocalStore: disk spill behaves like the in-memory store") {
  auto dir = std::filesystem::temp_directory_path() / "ftkn_spill_test";
  std::filesystem::remove_all(dir);
  {
    FocalStore store(2, dir);
    store.store(0, frame_points(0, {5, 6, 7}));
    store.store(1, frame_points(1, {1}));
    store.augment(1, frame_points(0, {5}));
    auto f = store.fetch(1);
    REQUIRE(f);
    CHECK(f->frame_index == 1);
    CHECK(f->points.ids == frame_points(1, {1}).ids);
    CHECK(f->points.timestamps == frame_points(1, {1}).timestamps);
    CHECK(f->augmented.ids == frame_points(0, {5}).ids);
    CHECK(std::filesystem::exists(dir / "focal_0.bin"));
    store.store(2, frame_points(2, {0}));
    CHECK_FALSE(std::filesystem::exists(dir / "focal_0.bin"));
    CHECK(store.fetch(0) == nullptr);
    CHECK(store.stored_points() == 3);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("focal frame records round trip bit exactly") {
  FocalFrame f;
  f.frame_index = 11;
  f.points = frame_points(11, {3, 1, 4});
  f.augmented = frame_points(10, {9});
  std::stringstream buf;
  write_focal_frame(buf, f);
  auto g = read_focal_frame(buf);
  CHECK(g.frame_index == 11);
  CHECK(g.points.coords == f.points.coords);
  CHECK(g.points.ids == f.points.ids);
  CHECK(g.augmented.ids == f.augmented.ids);
  CHECK(g.augmented.timestamps == f.augmented.timestamps);
}

TEST_CASE("FocalStore: concurrent readers never see a partial frame") {
  FocalStore store(64);
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r)
    readers.emplace_back([&] {
      while (!stop) {
        for (std::uint32_t f = 0; f < 40; ++f)
          if (auto p = store.fetch(f); p && (p->points.size() != 50 || p->points.ids.size() != 50)) ++bad;
      }
    });
  for (std::uint32_t f = 0; f < 40; ++f) {
    std::vector<std::uint32_t> rows(50);
    for (std::uint32_t i = 0; i < 50; ++i) rows[i] = i;
    store.store(f, frame_points(f, rows));
  }
  stop = true;
  for (auto& t : readers) t.join();
  CHECK(bad == 0);
  CHECK(store.frame_count() == 40);
}

TEST_CASE("peak stored points is monotone in the window") {
  Rng rng(3);
  std::vector<PointSet> frames;
  for (std::uint32_t f = 0; f < 40; ++f) {
    auto rows = rng.sample_without_replacement(100, 5 + rng.index(30));
    frames.push_back(frame_points(f, std::vector<std::uint32_t>(rows.begin(), rows.end())));
  }
  std::size_t prev = 0;
  for (std::size_t w : {1u, 2u, 4u, 8u, 16u, 32u, 64u}) {
    FocalStore store(w);
    for (std::uint32_t f = 0; f < frames.size(); ++f) store.store(f, frames[f]);
    CHECK(store.peak_stored_points() >= prev);
    prev = store.peak_stored_points();
  }
}
