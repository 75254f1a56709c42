#pragma once

#include <array>

#include "ftkn/geometry/box.hpp"

namespace ftkn::decoder {

/// (dx, dy, dz, dl, dw, dh, dyaw) relative to a proposal.
using Residual = std::array<double, 7>;

/// dx, dy: world-frame center offset over the proposal's BEV diagonal; dz: over the
/// proposal height; sizes as log ratios; yaw difference wrapped to [-pi, pi).
Residual encode_box(const geometry::Box7& target, const geometry::Box7& proposal);

/// Exact inverse of encode_box. Velocity, score and class come from the proposal.
geometry::Box7 decode_box(const geometry::Box7& proposal, const Residual& r);

}  // namespace ftkn::decoder
