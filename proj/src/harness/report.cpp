#include "ftkn/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ftkn/errors.hpp"

namespace ftkn::harness {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void add_metrics(ExperimentReport& r, const Metrics& m, const std::string& prefix) {
  auto put = [&](const std::string& k, double v) { r.metrics[prefix + k] = v; };
  put("gt", static_cast<double>(m.gt));
  put("proposals", static_cast<double>(m.proposals));
  put("matched", static_cast<double>(m.matched));
  put("iou_before", m.mean_iou_before);
  put("iou_after", m.mean_iou_after);
  put("iou_gain", m.mean_iou_after - m.mean_iou_before);
  put("recall50_before", m.recall50_before);
  put("recall50_after", m.recall50_after);
  put("recall70_before", m.recall70_before);
  put("recall70_after", m.recall70_after);
  for (std::size_t b = 0; b < m.buckets.size(); ++b) {
    const std::string name = std::string("bucket.") + kBucketNames[b] + ".";
    put(name + "gt", static_cast<double>(m.buckets[b].gt));
    put(name + "iou_before", m.buckets[b].iou_before);
    put(name + "iou_after", m.buckets[b].iou_after);
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path, const std::vector<ExperimentReport>& reports) {
  auto out = open_out(path);
  out << "tag,metric,value\n";
  for (const auto& r : reports)
    for (const auto& [k, v] : r.metrics) out << r.tag << ',' << k << ',' << format_number(v) << '\n';
}

std::vector<double> smooth(const std::vector<double>& values, std::size_t window) {
  std::vector<double> out;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i];
    if (i >= window) acc -= values[i - window];
    out.push_back(acc / static_cast<double>(std::min(i + 1, window)));
  }
  return out;
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& losses, std::size_t window) {
  auto out = open_out(path);
  out << "step,loss,smoothed\n";
  const auto sm = smooth(losses, window);
  for (std::size_t i = 0; i < losses.size(); ++i)
    out << i << ',' << format_number(losses[i]) << ',' << format_number(sm[i]) << '\n';
}

void write_predictions_csv(const std::filesystem::path& path, const std::vector<std::uint64_t>& scene_ids,
                           const std::vector<EvalFrame>& frames, const Metrics& metrics) {
  auto out = open_out(path);
  out << "scene,frame,proposal_id,conf,x,y,z,l,w,h,yaw,matched_gt,iou_before,iou_after\n";
  for (std::size_t s = 0; s < frames.size(); ++s) {
    for (std::size_t i = 0; i < frames[s].boxes.size(); ++i) {
      const auto& b = frames[s].boxes[i];
      const auto& m = metrics.matches.at(s).at(i);
      const auto& r = b.refined;
      out << scene_ids.at(s) << ',' << b.frame << ',' << b.proposal_index << ',' << format_number(b.confidence) << ','
          << format_number(r.center.x) << ',' << format_number(r.center.y) << ',' << format_number(r.center.z) << ','
          << format_number(r.size.x) << ',' << format_number(r.size.y) << ',' << format_number(r.size.z) << ','
          << format_number(r.yaw) << ',' << m.gt << ',' << format_number(m.iou_before) << ','
          << format_number(m.iou_after) << '\n';
    }
  }
}

std::string summary_text(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << "[" << r.tag << "] seed " << r.seed;
    if (r.wall_ms > 0) os << ", wall " << format_number(r.wall_ms / 1000.0) << " s";
    os << '\n';
    for (const auto& [k, v] : r.metrics) os << "  " << k << " = " << format_number(v) << '\n';
  }
  return os.str();
}

void write_summary(const std::filesystem::path& path, const std::vector<ExperimentReport>& reports) {
  auto out = open_out(path);
  out << summary_text(reports);
}

}  // namespace ftkn::harness
