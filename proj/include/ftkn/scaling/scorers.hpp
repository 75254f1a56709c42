#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftkn/geometry/box.hpp"
#include "ftkn/nn/tensor.hpp"
#include "ftkn/rng.hpp"

namespace ftkn::scaling {

/// How a scaling layer decides which tokens survive.
enum class Scorer { adaptive, supervised, gumbel_mask, random };

Scorer parse_scorer(const std::string& name);
std::string to_string(Scorer s);

/// Point-in-box supervision target. `a` is the smallest uniform scale of the box that
/// still contains the point; 1 well inside, 0 well outside, linear ramp of half-width
/// eta around the surface.
double supervised_score(const Vec3& point, const geometry::Box7& box, double eta);
/// Same ramp from a precomputed scale factor.
double supervised_score_from_scale(double a, double eta);
/// Max over axes of |local coordinate| / half-extent.
double containment_scale(const Vec3& point, const geometry::Box7& box);

/// Straight-through Gumbel-softmax over two-way logits [N x 2] (column 0 = keep).
/// Returns the keep gate [1 x N]: its value is the hard one-hot sample, its gradient
/// is that of the relaxed softmax at `temperature`.
nn::Tensor gumbel_keep_gates(const nn::Tensor& logits, double temperature, Rng& rng);

/// Linear anneal of the Gumbel temperature over training progress in [0, 1].
double gumbel_temperature(double progress, double start = 1.0, double end = 0.1);

/// `count` indices drawn uniformly without replacement among valid tokens, ascending.
/// If fewer valid tokens exist, every valid token is kept and the remainder is filled
/// with the lowest padded indices.
std::vector<std::size_t> random_select(const std::vector<bool>& valid, std::size_t count, std::uint64_t seed);

}  // namespace ftkn::scaling
