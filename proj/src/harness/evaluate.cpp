#include "ftkn/harness/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include "ftkn/geometry/iou.hpp"

namespace ftkn::harness {

std::size_t point_bucket(std::size_t points) {
  if (points <= 30) return 0;
  if (points <= 150) return 1;
  return 2;
}

Metrics evaluate(const std::vector<EvalFrame>& frames, double match_iou) {
  Metrics m;
  std::size_t hit50b = 0, hit50a = 0, hit70b = 0, hit70a = 0;
  double sum_b = 0.0, sum_a = 0.0;
  std::array<double, 3> bucket_b{}, bucket_a{};
  for (const auto& fr : frames) {
    m.gt += fr.gt.size();
    m.proposals += fr.boxes.size();
    std::vector<BoxMatch> matches(fr.boxes.size());
    std::vector<std::size_t> order(fr.boxes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fr.boxes[a].proposal.score > fr.boxes[b].proposal.score; });
    std::vector<bool> taken(fr.gt.size(), false);
    for (auto i : order) {
      int best = -1;
      double best_iou = match_iou;
      for (std::size_t g = 0; g < fr.gt.size(); ++g) {
        if (taken[g]) continue;
        const double iou = geometry::iou_bev(fr.boxes[i].proposal, fr.gt[g]);
        if (iou >= best_iou && (best < 0 || iou > best_iou)) {
          best = static_cast<int>(g);
          best_iou = iou;
        }
      }
      if (best < 0) continue;
      taken[best] = true;
      auto& bm = matches[i];
      bm.gt = best;
      bm.iou_before = best_iou;
      bm.iou_after = geometry::iou_bev(fr.boxes[i].refined, fr.gt[best]);
      ++m.matched;
      sum_b += bm.iou_before;
      sum_a += bm.iou_after;
      hit50b += bm.iou_before >= 0.5;
      hit50a += bm.iou_after >= 0.5;
      hit70b += bm.iou_before >= 0.7;
      hit70a += bm.iou_after >= 0.7;
      const std::size_t pts = static_cast<std::size_t>(best) < fr.gt_points.size() ? fr.gt_points[best] : 0;
      const auto bucket = point_bucket(pts);
      ++m.buckets[bucket].matched;
      bucket_b[bucket] += bm.iou_before;
      bucket_a[bucket] += bm.iou_after;
    }
    for (std::size_t g = 0; g < fr.gt.size(); ++g)
      ++m.buckets[point_bucket(g < fr.gt_points.size() ? fr.gt_points[g] : 0)].gt;
    m.matches.push_back(std::move(matches));
  }
  if (m.matched) {
    m.mean_iou_before = sum_b / static_cast<double>(m.matched);
    m.mean_iou_after = sum_a / static_cast<double>(m.matched);
  }
  if (m.gt) {
    const double n = static_cast<double>(m.gt);
    m.recall50_before = hit50b / n;
    m.recall50_after = hit50a / n;
    m.recall70_before = hit70b / n;
    m.recall70_after = hit70a / n;
  }
  for (std::size_t b = 0; b < 3; ++b) {
    if (!m.buckets[b].matched) continue;
    m.buckets[b].iou_before = bucket_b[b] / static_cast<double>(m.buckets[b].matched);
    m.buckets[b].iou_after = bucket_a[b] / static_cast<double>(m.buckets[b].matched);
  }
  return m;
}

}  // namespace ftkn::harness
