#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "../support/gradcheck.hpp"
#include "ftkn/errors.hpp"
#include "ftkn/nn/attention.hpp"
#include "ftkn/nn/checkpoint.hpp"
#include "ftkn/nn/op_counter.hpp"
#include "ftkn/nn/ops.hpp"
#include "ftkn/nn/optim.hpp"

using namespace ftkn;
using namespace ftkn::nn;
using ftkn::testing::grad_check;
using ftkn::testing::random_leaf;

TEST_CASE("linear: identity and hand arithmetic") {
  auto eye = Tensor::matrix({{1, 0}, {0, 1}});
  auto y = linear(eye, eye, Tensor::zeros({2}));
  CHECK(std::vector<double>(y.data().begin(), y.data().end()) == std::vector<double>{1, 0, 0, 1});

  auto y2 = linear(Tensor::matrix({{1, 2}}), eye, Tensor::from({2}, {3, 3}));
  CHECK(y2.at(0, 0) == 4.0);
  CHECK(y2.at(0, 1) == 5.0);
}

TEST_CASE("linear: shape mismatch raises a dimension error") {
  auto x = Tensor::zeros({2, 3});
  auto w = Tensor::zeros({4, 2});
  CHECK_THROWS_AS(linear(x, w, Tensor::zeros({2})), DimensionError);
  CHECK_THROWS_AS(linear(x, Tensor::zeros({3, 2}), Tensor::zeros({5})), DimensionError);
}

TEST_CASE("linear: gradient matches finite differences on a 3x4 input") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto r = grad_check({random_leaf({3, 4}, rng), random_leaf({4, 5}, rng), random_leaf({5}, rng)},
                        [](const auto& in) { return linear(in[0], in[1], in[2]); }, seed);
    CHECK(r.max_rel_err <= 1e-6);
  }
}

TEST_CASE("softmax_rows: closed forms and row sums") {
  auto u = softmax_rows(Tensor::matrix({{2, 2, 2, 2}}));
  for (double v : u.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  auto p = softmax_rows(Tensor::matrix({{0.0, std::log(3.0)}}));
  CHECK(p.at(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(p.at(1) == doctest::Approx(0.75).epsilon(1e-14));

  Rng rng(3);
  auto x = random_leaf({6, 9}, rng, -30, 30);
  auto s = softmax_rows(x);
  for (std::size_t i = 0; i < 6; ++i) {
    double total = 0;
    for (std::size_t j = 0; j < 9; ++j) {
      CHECK(s.at(i, j) >= 0.0);
      total += s.at(i, j);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("softmax_rows: masked columns get zero, fully masked rows stay zero") {
  auto x = Tensor::matrix({{1, 5, 2}});
  std::vector<bool> valid{true, false, true};
  auto p = softmax_rows(x, valid);
  CHECK(p.at(1) == 0.0);
  CHECK(p.at(0) + p.at(2) == doctest::Approx(1.0));
  std::vector<bool> none{false, false, false};
  auto z = softmax_rows(x, none);
  for (double v : z.data()) CHECK(v == 0.0);
}

TEST_CASE("softmax_rows: gradient on random 4x5") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto r = grad_check({random_leaf({4, 5}, rng, -2, 2)}, [](const auto& in) { return softmax_rows(in[0]); }, seed);
    CHECK(r.max_rel_err <= 1e-6);
  }
}

TEST_CASE("softmax_rows_gated: gradient in both logits and gates") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto r = grad_check({random_leaf({3, 5}, rng, -2, 2), random_leaf({1, 5}, rng, 0.2, 1.0)},
                        [](const auto& in) { return softmax_rows_gated(in[0], in[1]); }, seed);
    CHECK(r.max_rel_err <= 1e-5);
  }
}

TEST_CASE("multi_head_attention: single key gives unit attention") {
  ParameterStore store;
  Rng rng(1);
  auto attn = MultiHeadAttention::create(store, "a", 8, 2, rng);
  auto q = random_leaf({3, 8}, rng);
  auto kv = random_leaf({1, 8}, rng);
  auto res = multi_head_attention(attn, q, kv, kv);
  REQUIRE(res.maps.size() == 2);
  for (const auto& m : res.maps) {
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 1);
    for (double v : m.data()) CHECK(v == 1.0);
  }
}

TEST_CASE("multi_head_attention: key/value permutation permutes map columns, output unchanged") {
  ParameterStore store;
  Rng rng(2);
  auto attn = MultiHeadAttention::create(store, "a", 8, 4, rng);
  auto q = random_leaf({4, 8}, rng);
  auto kv = random_leaf({5, 8}, rng);
  std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  auto kv_perm = gather_rows(kv, perm);
  auto a = multi_head_attention(attn, q, kv, kv);
  auto b = multi_head_attention(attn, q, kv_perm, kv_perm);
  for (std::size_t i = 0; i < a.out.size(); ++i) CHECK(a.out.at(i) == doctest::Approx(b.out.at(i)).epsilon(1e-12));
  for (std::size_t h = 0; h < 4; ++h)
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 5; ++c)
        CHECK(b.maps[h].at(r, c) == doctest::Approx(a.maps[h].at(r, perm[c])).epsilon(1e-12));
}

TEST_CASE("multi_head_attention: head count must divide the dimension") {
  ParameterStore store;
  Rng rng(0);
  CHECK_THROWS_AS(MultiHeadAttention::create(store, "a", 10, 4, rng), ConfigError);
}

TEST_CASE("multi_head_attention: gradient on random 6x16 with 4 heads") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ParameterStore store;
    Rng rng(seed);
    auto attn = MultiHeadAttention::create(store, "a", 16, 4, rng);
    std::vector<Tensor> inputs{random_leaf({6, 16}, rng)};
    for (const auto& p : store.parameters()) inputs.push_back(p.tensor);
    auto r = grad_check(inputs, [&](const auto& in) { return multi_head_attention(attn, in[0], in[0], in[0]).out; },
                        seed);
    CHECK(r.max_rel_err <= 1e-5);
  }
}

TEST_CASE("multi_head_attention: attention cell count is H*Nq*Nk") {
  ParameterStore store;
  Rng rng(0);
  auto attn = MultiHeadAttention::create(store, "a", 8, 4, rng);
  OpCounter counter;
  {
    ScopedOpCounter scope(counter);
    multi_head_attention(attn, random_leaf({3, 8}, rng), random_leaf({7, 8}, rng), random_leaf({7, 8}, rng));
  }
  CHECK(counter.attention_cells == 4u * 3u * 7u);
  CHECK(counter.mul_adds > 0);
  CHECK(counter.peak_live_values > 0);
}

TEST_CASE("layer_norm: zero rows and zero-variance rows") {
  auto gain = Tensor::filled({4}, 1.0);
  auto shift = Tensor::zeros({4});
  auto z = layer_norm(Tensor::zeros({1, 4}), gain, shift);
  for (double v : z.data()) CHECK(v == 0.0);
  auto c = layer_norm(Tensor::matrix({{1, 1, 1, 1}}), gain, shift);
  for (double v : c.data()) CHECK(v == 0.0);
}

TEST_CASE("layer_norm: gradient") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto r = grad_check({random_leaf({3, 6}, rng, -3, 3), random_leaf({6}, rng), random_leaf({6}, rng)},
                        [](const auto& in) { return layer_norm(in[0], in[1], in[2]); }, seed);
    CHECK(r.max_rel_err <= 1e-5);
  }
}

TEST_CASE("max_pool_seq: single row, permutation invariance, brute-force max") {
  auto one = Tensor::matrix({{1, -2, 3}});
  auto p1 = max_pool_seq(one);
  CHECK(std::vector<double>(p1.pooled.data().begin(), p1.pooled.data().end()) == std::vector<double>{1, -2, 3});

  Rng rng(4);
  auto x = random_leaf({5, 3}, rng);
  auto p = max_pool_seq(x);
  for (std::size_t j = 0; j < 3; ++j) {
    double best = -1e300;
    for (std::size_t i = 0; i < 5; ++i) best = std::max(best, x.at(i, j));
    CHECK(p.pooled.at(j) == best);
  }
  std::vector<std::size_t> perm{4, 2, 0, 1, 3};
  auto q = max_pool_seq(gather_rows(x, perm));
  for (std::size_t j = 0; j < 3; ++j) CHECK(q.pooled.at(j) == p.pooled.at(j));
}

TEST_CASE("max_pool_seq: ties route gradient to the first occurrence") {
  auto x = Tensor::leaf({3, 1}, {2.0, 2.0, 1.0});
  auto p = max_pool_seq(x);
  CHECK(p.argmax[0] == 0);
  sum(p.pooled).backward();
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 0.0);
}

TEST_CASE("composite ops: gradient checks") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto r = grad_check({random_leaf({4, 3}, rng), random_leaf({4, 2}, rng)},
                        [](const auto& in) {
                          std::vector<Tensor> parts{in[0], sigmoid(in[1])};
                          auto c = concat_cols(parts);
                          std::size_t rows[] = {3, 1, 1};
                          auto g = gather_rows(c, rows);
                          auto pooled = max_pool_seq(relu(c)).pooled;
                          std::vector<Tensor> stacked{g, repeat_row(pooled, 2)};
                          return slice_cols(concat_rows(stacked), 1, 4);
                        },
                        seed);
    CHECK(r.max_rel_err <= 1e-5);
  }
}

TEST_CASE("losses: gradient checks") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    std::vector<double> t{0.2, 0.9, 0.0};
    std::vector<double> reg{0.1, -0.3, 0.5, 2.0};
    auto r = grad_check({random_leaf({1, 3}, rng, -3, 3), random_leaf({1, 4}, rng)},
                        [&](const auto& in) { return add(bce_with_logits(in[0], t), smooth_l1(in[1], reg, 1.0 / 9.0)); },
                        seed);
    CHECK(r.max_rel_err <= 1e-5);
  }
}

TEST_CASE("one-cycle schedule shape") {
  CHECK(one_cycle_lr(0, 100, 0.1) == doctest::Approx(0.01));
  CHECK(one_cycle_lr(30, 100, 0.1) == doctest::Approx(0.1));
  CHECK(one_cycle_lr(100, 100, 0.1) == doctest::Approx(1e-4));
  for (std::size_t s = 30; s < 100; ++s) CHECK(one_cycle_lr(s + 1, 100, 0.1) <= one_cycle_lr(s, 100, 0.1));
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  auto w = Tensor::leaf({3}, {1.0, -2.0, 0.5});
  AdamOneCycle opt({w}, 10, 0.1);
  for (int i = 0; i < 5; ++i) opt.step({std::vector<double>(3, 0.0)});
  CHECK(w.at(0) == 1.0);
  CHECK(w.at(1) == -2.0);
  CHECK(w.at(2) == 0.5);
}

TEST_CASE("adam: quadratic bowl converges within 500 steps") {
  auto w = Tensor::leaf({4}, {1.0, -0.5, 0.8, 0.3});
  AdamOneCycle opt({w}, 500, 0.1);
  for (int i = 0; i < 500; ++i) {
    w.zero_grad();
    sum(mul(w, w)).backward();
    opt.step();
  }
  double norm = 0.0;
  for (double v : w.data()) norm += v * v;
  CHECK(std::sqrt(norm) <= 1e-3);
}

TEST_CASE("checkpoint round trip is bit exact and rejects mismatches") {
  ParameterStore a;
  Rng rng(9);
  Linear::create(a, "l", 3, 2, rng);
  LayerNorm::create(a, "n", 2, rng);
  std::stringstream buf;
  write_checkpoint(buf, a);

  ParameterStore b;
  Rng other(10);
  Linear::create(b, "l", 3, 2, other);
  LayerNorm::create(b, "n", 2, other);
  read_checkpoint(buf, b);
  for (std::size_t i = 0; i < a.parameters().size(); ++i) {
    auto x = a.parameters()[i].tensor.data();
    auto y = b.parameters()[i].tensor.data();
    CHECK(std::equal(x.begin(), x.end(), y.begin()));
  }

  std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "FTKN");

  ParameterStore c;
  Linear::create(c, "l", 4, 2, other);
  std::stringstream again(bytes);
  CHECK_THROWS_AS(read_checkpoint(again, c), FormatError);
}

TEST_CASE("parameter names are unique") {
  ParameterStore s;
  Rng rng(0);
  s.create("x", {2}, InitScheme::zeros, rng);
  CHECK_THROWS_AS(s.create("x", {2}, InitScheme::zeros, rng), ConfigError);
}

TEST_CASE("uniform fan-in init respects its bound") {
  ParameterStore s;
  Rng rng(0);
  auto w = s.create("w", {16, 8}, InitScheme::uniform_fan_in, rng);
  for (double v : w.data()) CHECK(std::abs(v) <= 0.25);
}

TEST_CASE("forward passes are bit reproducible") {
  auto run = [] {
    ParameterStore store;
    Rng rng(77);
    auto attn = MultiHeadAttention::create(store, "a", 16, 4, rng);
    auto x = random_leaf({7, 16}, rng);
    auto out = multi_head_attention(attn, x, x, x).out;
    return std::vector<double>(out.data().begin(), out.data().end());
  };
  CHECK(run() == run());
}
