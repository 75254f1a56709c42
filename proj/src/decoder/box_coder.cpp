#include "ftkn/decoder/box_coder.hpp"

#include <cmath>

namespace ftkn::decoder {

Residual encode_box(const geometry::Box7& target, const geometry::Box7& proposal) {
  const double diag = proposal.bev_diagonal();
  return {(target.center.x - proposal.center.x) / diag,
          (target.center.y - proposal.center.y) / diag,
          (target.center.z - proposal.center.z) / proposal.size.z,
          std::log(target.size.x / proposal.size.x),
          std::log(target.size.y / proposal.size.y),
          std::log(target.size.z / proposal.size.z),
          geometry::wrap_angle(target.yaw - proposal.yaw)};
}

geometry::Box7 decode_box(const geometry::Box7& proposal, const Residual& r) {
  const double diag = proposal.bev_diagonal();
  geometry::Box7 b = proposal;
  b.center = {proposal.center.x + r[0] * diag, proposal.center.y + r[1] * diag,
              proposal.center.z + r[2] * proposal.size.z};
  b.size = {proposal.size.x * std::exp(r[3]), proposal.size.y * std::exp(r[4]), proposal.size.z * std::exp(r[5])};
  b.yaw = geometry::wrap_angle(proposal.yaw + r[6]);
  return b;
}

}  // namespace ftkn::decoder
