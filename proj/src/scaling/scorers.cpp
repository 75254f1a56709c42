#include "ftkn/scaling/scorers.hpp"

#include <algorithm>
#include <cmath>

#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"

namespace ftkn::scaling {

Scorer parse_scorer(const std::string& name) {
  if (name == "adaptive") return Scorer::adaptive;
  if (name == "supervised") return Scorer::supervised;
  if (name == "gumbel_mask") return Scorer::gumbel_mask;
  if (name == "random") return Scorer::random;
  throw ConfigError("unknown scorer '" + name + "'");
}

std::string to_string(Scorer s) {
  switch (s) {
    case Scorer::adaptive: return "adaptive";
    case Scorer::supervised: return "supervised";
    case Scorer::gumbel_mask: return "gumbel_mask";
    case Scorer::random: return "random";
  }
  return "?";
}

double containment_scale(const Vec3& point, const geometry::Box7& box) {
  const Vec3 l = geometry::to_box_frame(box, point);
  return std::max({std::abs(l.x) / (box.size.x / 2), std::abs(l.y) / (box.size.y / 2),
                   std::abs(l.z) / (box.size.z / 2)});
}

double supervised_score_from_scale(double a, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  if (a < 1.0 - eta) return 1.0;
  if (a > 1.0 + eta) return 0.0;
  return (1.0 + eta - a) / (2.0 * eta);
}

double supervised_score(const Vec3& point, const geometry::Box7& box, double eta) {
  return supervised_score_from_scale(containment_scale(point, box), eta);
}

nn::Tensor gumbel_keep_gates(const nn::Tensor& logits, double temperature, Rng& rng) {
  if (!(temperature > 0.0)) throw ConfigError("gumbel temperature must be positive");
  if (logits.cols() != 2) throw DimensionError("gumbel gates expect [N x 2] logits");
  const std::size_t n = logits.rows();
  std::vector<double> noise(n * 2);
  for (auto& g : noise) g = rng.gumbel();
  auto perturbed = nn::add(logits, nn::Tensor::from({n, 2}, noise));
  auto soft = nn::softmax_rows(nn::scale(perturbed, 1.0 / temperature));
  std::vector<double> hard(n * 2, 0.0);
  for (std::size_t i = 0; i < n; ++i) hard[i * 2 + (perturbed.at(i, 0) >= perturbed.at(i, 1) ? 0 : 1)] = 1.0;
  // value = hard, gradient = d soft
  auto st = nn::add(nn::sub(nn::Tensor::from({n, 2}, hard), soft.detach()), soft);
  return nn::reshape(nn::slice_cols(st, 0, 1), {1, n});
}

double gumbel_temperature(double progress, double start, double end) {
  const double t = std::clamp(progress, 0.0, 1.0);
  return start + (end - start) * t;
}

std::vector<std::size_t> random_select(const std::vector<bool>& valid, std::size_t count, std::uint64_t seed) {
  if (count > valid.size()) throw ConfigError("random_select: more tokens requested than available");
  std::vector<std::size_t> real, padded;
  for (std::size_t i = 0; i < valid.size(); ++i) (valid[i] ? real : padded).push_back(i);
  std::vector<std::size_t> out;
  if (count <= real.size()) {
    Rng rng(seed);
    for (auto k : rng.sample_without_replacement(real.size(), count)) out.push_back(real[k]);
  } else {
    out = real;
    out.insert(out.end(), padded.begin(), padded.begin() + static_cast<std::ptrdiff_t>(count - real.size()));
    std::sort(out.begin(), out.end());
  }
  return out;
}

}  // namespace ftkn::scaling
