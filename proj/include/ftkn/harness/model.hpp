#pragma once

#include <filesystem>
#include <memory>

#include "ftkn/decoder/dual_decoder.hpp"
#include "ftkn/fusion/msp.hpp"
#include "ftkn/geometry/embed.hpp"
#include "ftkn/harness/config.hpp"
#include "ftkn/nn/parameter.hpp"
#include "ftkn/scaling/ad_mhsa.hpp"

namespace ftkn::harness {

/// Every trainable block of the refinement network. Parameters are shared tensor
/// handles owned by `store`, so a model is not copyable.
struct Model {
  ExperimentConfig cfg;
  nn::ParameterStore store;
  nn::Mlp geometry_mlp;  // (27 + extras) -> D -> D
  nn::Mlp motion_mlp;    // 28 -> D -> D
  scaling::SspCondenser ssp;
  fusion::MspCondenser msp;
  decoder::DualDecoder decoder;
  decoder::PredictionHead head;      // on the multi-frame query
  decoder::PredictionHead aux_head;  // on the current-frame query, training only

  Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  /// Throws ConfigError when cfg does not validate.
  static std::unique_ptr<Model> create(const ExperimentConfig& cfg, std::uint64_t seed);

  geometry::Embedder geometry_embedder() const;
  geometry::Embedder motion_embedder() const;

  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);
};

}  // namespace ftkn::harness
