#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "../support/gradcheck.hpp"
#include "ftkn/decoder/loss.hpp"
#include "ftkn/errors.hpp"
#include "ftkn/nn/ops.hpp"

using namespace ftkn;
using namespace ftkn::decoder;
using geometry::Box7;
using nn::Tensor;

namespace {

TokenSequence tokens(std::size_t n, std::size_t dim, Rng& rng, std::size_t padded = 0) {
  TokenSequence s;
  std::vector<double> f(n * dim, 0.0);
  for (std::size_t i = 0; i < (n - padded) * dim; ++i) f[i] = rng.normal();
  s.features = Tensor::from({n, dim}, f);
  for (std::size_t i = 0; i < n; ++i) {
    s.point_ids.push_back(i < n - padded ? make_point_id(0, static_cast<std::uint32_t>(i)) : kPadId);
    s.positions.push_back({});
  }
  return s;
}

Box7 random_box(Rng& rng) {
  return Box7::make({rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-1, 1)},
                    {rng.uniform(0.5, 6), rng.uniform(0.4, 3), rng.uniform(0.5, 2.5)},
                    rng.uniform(-std::numbers::pi, std::numbers::pi));
}

}  // namespace

TEST_CASE("dual decoder: a single current token gets all the attention") {
  Rng rng(1);
  nn::ParameterStore store;
  auto dec = DualDecoder::create(store, "dec", 8, 2, rng);
  auto f = tokens(1, 8, rng);
  auto q = dec.decode_single(f);
  // q^s = FFN(q + out(value(f)))
  auto expected = dec.single_ffn(nn::add(dec.query, dec.single_attn.output(dec.single_attn.value(f.features))));
  for (std::size_t c = 0; c < 8; ++c) CHECK(q.at(c) == doctest::Approx(expected.at(c)).epsilon(1e-12));
}

TEST_CASE("dual decoder: values behind padded keys do not matter") {
  Rng rng(2);
  nn::ParameterStore store;
  auto dec = DualDecoder::create(store, "dec", 8, 2, rng);
  auto fs = tokens(5, 8, rng, 2);
  auto fm = tokens(7, 8, rng, 3);
  auto base = dec(fs, fm);
  auto fs2 = fs, fm2 = fm;
  std::vector<double> a(fs.features.data().begin(), fs.features.data().end());
  std::vector<double> b(fm.features.data().begin(), fm.features.data().end());
  for (std::size_t i = 3 * 8; i < a.size(); ++i) a[i] = rng.normal() * 50;
  for (std::size_t i = 4 * 8; i < b.size(); ++i) b[i] = rng.normal() * 50;
  fs2.features = Tensor::from({5, 8}, a);
  fm2.features = Tensor::from({7, 8}, b);
  auto other = dec(fs2, fm2);
  for (std::size_t c = 0; c < 8; ++c) CHECK(other.multi.at(c) == doctest::Approx(base.multi.at(c)).epsilon(1e-12));
  CHECK_THROWS_AS(dec(fs, tokens(3, 8, rng, 3)), ConfigError);
}

TEST_CASE("dual decoder: gradient check through both layers and the heads") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    nn::ParameterStore store;
    auto dec = DualDecoder::create(store, "dec", 8, 2, rng);
    auto head = PredictionHead::create(store, "head", 8, rng);
    auto fs = tokens(4, 8, rng, 1), fm = tokens(6, 8, rng, 2);
    auto xs = testing::random_leaf({4, 8}, rng), xm = testing::random_leaf({6, 8}, rng);
    auto res = testing::grad_check(
        {xs, xm, dec.query, dec.single_attn.query.weight, dec.multi_attn.value.weight, dec.multi_ffn.up.weight,
         head.regression.first.weight},
        [&](const std::vector<Tensor>& in) {
          auto s = fs, m = fm;
          s.features = in[0];
          m.features = in[1];
          auto q = dec(s, m);
          auto out = head(q.multi);
          std::vector<Tensor> parts{out.logit, out.residual, q.single};
          return nn::concat_cols(parts);
        },
        seed);
    CHECK(res.max_rel_err <= 1e-5);
  }
}

TEST_CASE("box coder: zero residual, round trip and wrap") {
  auto p = Box7::make({1, 2, 0.5}, {4, 2, 1.5}, 0.3, geometry::Velocity{1, 0});
  auto same = decode_box(p, Residual{});
  CHECK(same.center == p.center);
  CHECK(same.size == p.size);
  CHECK(same.yaw == doctest::Approx(p.yaw));
  CHECK(same.velocity->vx == 1.0);
  auto g = Box7::make({2, 1, 0.2}, {4.5, 1.8, 1.6}, 3.0);
  auto back = decode_box(p, encode_box(g, p));
  CHECK((back.center - g.center).norm() <= 1e-9);
  CHECK((back.size - g.size).norm() <= 1e-9);
  CHECK(std::abs(geometry::wrap_angle(back.yaw - g.yaw)) <= 1e-9);
  CHECK(std::abs(encode_box(g, p)[6]) <= std::numbers::pi);
}

TEST_CASE("box coder: round trip over 10^4 random pairs") {
  Rng rng(3);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    auto p = random_box(rng), g = random_box(rng);
    auto b = decode_box(p, encode_box(g, p));
    worst = std::max({worst, (b.center - g.center).norm(), (b.size - g.size).norm(),
                      std::abs(geometry::wrap_angle(b.yaw - g.yaw))});
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("confidence target and positive threshold") {
  CHECK(confidence_target(0.75) == 1.0);
  CHECK(confidence_target(0.25) == 0.0);
  CHECK(confidence_target(0.5) == doctest::Approx(0.5));
  auto p = Box7::make({}, {2, 2, 1}, 0);
  LossConfig cfg;
  CHECK(make_target(p, Box7::make({1, 0, 0}, {2, 2, 1}, 0), cfg).positive == false);  // IoU 1/3
  auto t = make_target(p, Box7::make({0.1, 0, 0}, {2, 2, 1}, 0), cfg);
  CHECK(t.positive);
  CHECK(t.iou == doctest::Approx(1.9 / 2.1));
  CHECK_FALSE(make_target(p, std::nullopt, cfg).positive);
}

TEST_CASE("refinement loss: perfect regression, weight linearity, errors") {
  auto p = Box7::make({0, 0, 0}, {4, 2, 1.5}, 0.1);
  auto g = Box7::make({0.2, -0.1, 0.05}, {4.2, 1.9, 1.5}, 0.15);
  LossConfig cfg;
  auto target = make_target(p, g, cfg);
  REQUIRE(target.positive);
  auto enc = encode_box(g, p);
  PredictionHead::Output perfect{Tensor::filled({1, 1}, 30.0), Tensor::from({1, 7}, {enc.begin(), enc.end()})};
  auto l = refinement_loss(perfect, p, target, cfg);
  CHECK(l.regression == 0.0);
  CHECK(l.total.item() >= 0.0);

  PredictionHead::Output off{Tensor::filled({1, 1}, 0.3), Tensor::filled({1, 7}, 0.2)};
  auto a = refinement_loss(off, p, target, cfg);
  auto cfg2 = cfg;
  cfg2.regression_weight *= 2;
  auto b = refinement_loss(off, p, target, cfg2);
  CHECK(b.total.item() - b.confidence == doctest::Approx(2 * (a.total.item() - a.confidence)).epsilon(1e-12));
  CHECK(a.regression > 0.0);

  RefinementTarget bad;
  bad.positive = true;
  CHECK_THROWS_AS(refinement_loss(off, p, bad, cfg), std::logic_error);
  auto neg = refinement_loss(off, p, make_target(p, std::nullopt, cfg), cfg);
  CHECK(neg.regression == 0.0);
  CHECK(neg.total.item() == doctest::Approx(neg.confidence));
  cfg2.regression_weight = 0.0;
  CHECK_THROWS_AS(refinement_loss(off, p, target, cfg2), ConfigError);
}

TEST_CASE("refinement loss is non-negative on random inputs") {
  Rng rng(4);
  LossConfig cfg;
  for (int t = 0; t < 200; ++t) {
    auto p = random_box(rng);
    auto g = p;
    g.center.x += rng.normal(0, 0.3);
    g.yaw += rng.normal(0, 0.1);
    PredictionHead::Output o{Tensor::filled({1, 1}, rng.normal(0, 3)), testing::random_leaf({1, 7}, rng)};
    CHECK(refinement_loss(o, p, make_target(p, g, cfg), cfg).total.item() >= 0.0);
  }
}
