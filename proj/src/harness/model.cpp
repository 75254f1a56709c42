#include "ftkn/harness/model.hpp"

#include "ftkn/nn/checkpoint.hpp"

namespace ftkn::harness {

std::unique_ptr<Model> Model::create(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto m = std::make_unique<Model>();
  m->cfg = cfg;
  Rng rng(mix_seed(seed, 0x30de1));
  const std::size_t D = cfg.model.dim, H = cfg.model.heads;
  m->geometry_mlp = nn::Mlp::create(m->store, "embed.geometry", geometry::kOffsetFeatures + 1, D, D, rng);
  m->motion_mlp = nn::Mlp::create(m->store, "embed.motion", geometry::kOffsetFeatures + 1, D, D, rng);
  m->ssp = scaling::SspCondenser::create(m->store, "ssp", D, cfg.ssp_scaling(), rng);
  m->msp = fusion::MspCondenser::create(m->store, "msp", D, H, cfg.scaling.scorer, cfg.schedule(), cfg.fusion.T,
                                        cfg.sampling.k(), rng);
  m->msp.plain_concat = !cfg.toggles.igf;
  m->decoder = decoder::DualDecoder::create(m->store, "decoder", D, H, rng);
  m->head = decoder::PredictionHead::create(m->store, "head", D, rng);
  m->aux_head = decoder::PredictionHead::create(m->store, "aux_head", D, rng);
  return m;
}

geometry::Embedder Model::geometry_embedder() const {
  return [this](const nn::Tensor& x) { return geometry_mlp(x); };
}

geometry::Embedder Model::motion_embedder() const {
  return [this](const nn::Tensor& x) { return motion_mlp(x); };
}

void Model::save(const std::filesystem::path& path) const { nn::save_checkpoint(path, store); }

void Model::load(const std::filesystem::path& path) { nn::load_checkpoint(path, store); }

}  // namespace ftkn::harness
