#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "ftkn/decoder/loss.hpp"
#include "ftkn/fusion/schedule.hpp"
#include "ftkn/scaling/ad_mhsa.hpp"

namespace ftkn::harness {

struct ModelConfig {
  std::size_t dim = 256;
  std::size_t heads = 8;
};

struct SamplingConfig {
  std::size_t focal = 48;       // K: focal tokens kept per proposal and frame
  std::size_t oversample = 4;   // current frame samples oversample * K points
  double gamma = 1.0;           // scales K (and with it 4K) for the sampling-ratio sweep
  double track_iou = 0.3;       // proposal linking threshold across frames

  std::size_t k() const;
  std::size_t current_samples() const { return oversample * k(); }
};

struct ScalingSection {
  double beta1 = 0.5;
  double beta2 = 0.5;
  std::size_t layers = 2;
  scaling::Scorer scorer = scaling::Scorer::adaptive;
  double eta = 0.2;
  double temperature_start = 1.0;
  double temperature_end = 0.1;
};

struct FusionSection {
  std::size_t T = 16;
  std::size_t G = 4;
  fusion::GroupStrategy strategy = fusion::GroupStrategy::equal_stride;
  std::size_t k_out = 0;  // 0: same as K
  std::optional<std::vector<fusion::FusionSchedule::Stage>> stages;
};

struct SceneConfig {
  std::size_t train_scenes = 200;
  std::size_t eval_scenes = 50;
  std::size_t frames = 0;  // 0: T frames
  std::size_t min_objects = 3;
  std::size_t max_objects = 8;
  double min_range = 6.0;
  double max_range = 40.0;
  double reference_range = 10.0;
  double points_at_reference = 240.0;  // expected surface points at the reference range
  std::size_t min_points = 5;
  std::size_t max_points = 500;
  double clutter_per_m2 = 0.01;
  double extent = 50.0;  // clutter square half-size
  double point_noise = 0.02;
  double max_speed = 10.0;
  double motion_noise = 0.05;
};

struct RpnConfig {
  double sigma_xyz = 0.3;
  double sigma_size = 0.08;  // relative
  double sigma_yaw = 0.08;
  double sigma_velocity = 0.3;
  double recall = 1.0;
  double fp_rate = 0.3;  // expected false positives per frame
};

struct TrainConfig {
  std::size_t epochs = 6;
  std::size_t batch = 5;
  double lr = 3e-4;
  std::size_t focal_after = 3;    // bank materialized after this epoch
  std::size_t refresh_after = 5;  // and refreshed after this one
  bool epa = true;
  std::size_t epa_threshold = 28;
  std::size_t epa_window = 2;
  bool aux_head = true;
  double aux_weight = 1.0;
  double keep_ratio_weight = 1.0;  // gumbel_mask scorer only
  double supervised_weight = 1.0;  // supervised scorer only
  decoder::LossConfig loss;
  std::size_t frames_per_scene = 1;  // trailing frames of each scene used as training samples
};

/// Component switches for the ablation table.
struct Toggles {
  bool ssp_decoder = true;
  bool msp_decoder = true;
  bool igf = true;
  bool motion = true;
};

struct EvalConfig {
  double match_iou = 0.1;
};

struct RobustConfig {
  double point_drop = 0.0;
  double box_drop = 0.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 7;
  ModelConfig model;
  SamplingConfig sampling;
  ScalingSection scaling;
  FusionSection fusion;
  SceneConfig scene;
  RpnConfig rpn;
  TrainConfig train;
  Toggles toggles;
  EvalConfig eval;
  RobustConfig robust;

  /// Full-size shapes (D=256, H=8, K=48, T=16): the defaults.
  static ExperimentConfig full_scale() { return {}; }
  /// Small model and data used by the training experiments.
  static ExperimentConfig desk_scale();

  std::size_t frames_per_scene() const { return scene.frames ? scene.frames : fusion.T; }
  std::size_t k_out() const { return fusion.k_out ? fusion.k_out : sampling.k(); }
  scaling::ScalingConfig ssp_scaling() const;
  fusion::FusionSchedule schedule() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  nlohmann::json to_json() const;
};

/// Applies a (possibly nested or dotted-key) document; unknown keys throw ConfigError.
void apply_config(ExperimentConfig& cfg, const nlohmann::json& doc);
/// Applies a single dotted key, e.g. "scaling.scorer" = "random".
void apply_setting(ExperimentConfig& cfg, const std::string& key, const nlohmann::json& value);

/// Small TOML subset: tables, dotted keys, strings, numbers, booleans, arrays and
/// inline tables. Throws ConfigError with a line number on malformed input.
nlohmann::json parse_toml(const std::string& text);

/// JSON when the file extension is .json or the text starts with '{', TOML otherwise.
nlohmann::json load_config_document(const std::filesystem::path& path);

}  // namespace ftkn::harness
