#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftkn/harness/evaluate.hpp"

namespace ftkn::harness {

/// One experiment's outcome: named metrics plus what is needed to rerun it.
struct ExperimentReport {
  std::string tag;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;  // ordered, so CSV output is stable
  std::vector<double> loss_curve;         // per optimizer step
  nlohmann::json config;
  double wall_ms = 0.0;  // kept out of CSV files so they stay byte-identical across runs
};

/// Fixed-precision number formatting used by every CSV writer.
std::string format_number(double v);

/// Adds the evaluation metrics under a prefix ("" for none).
void add_metrics(ExperimentReport& report, const Metrics& m, const std::string& prefix = "");

/// tag,metric,value rows for a list of reports.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<ExperimentReport>& reports);
/// step,loss,smoothed rows.
void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& losses, std::size_t window = 50);
/// One row per refined box with its match.
void write_predictions_csv(const std::filesystem::path& path, const std::vector<std::uint64_t>& scene_ids,
                           const std::vector<EvalFrame>& frames, const Metrics& metrics);
/// Human-readable summary including wall times.
void write_summary(const std::filesystem::path& path, const std::vector<ExperimentReport>& reports);
std::string summary_text(const std::vector<ExperimentReport>& reports);

/// Trailing moving average with the given window (shorter at the start).
std::vector<double> smooth(const std::vector<double>& values, std::size_t window);

}  // namespace ftkn::harness
