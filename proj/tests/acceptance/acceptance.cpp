// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.
// Usage: acceptance [--ftkn path/to/ftkn] [--only 1,2,...] [--work dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"
#include "ftkn/decoder/dual_decoder.hpp"
#include "ftkn/fusion/grouping.hpp"
#include "ftkn/fusion/igf.hpp"
#include "ftkn/fusion/schedule.hpp"
#include "ftkn/geometry/iou.hpp"
#include "ftkn/harness/experiments.hpp"
#include "ftkn/harness/scene_gen.hpp"
#include "ftkn/harness/thread_pool.hpp"
#include "ftkn/memory/dedup.hpp"
#include "ftkn/nn/attention.hpp"
#include "ftkn/nn/ops.hpp"
#include "ftkn/scaling/ad_mhsa.hpp"
#include "ftkn/scaling/scorers.hpp"

namespace fs = std::filesystem;
using namespace ftkn;
using namespace ftkn::harness;
using nn::Tensor;
using testing::grad_check;
using testing::random_leaf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
  bool report_only = false;  // within the tolerance band: printed as PASS with a note
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

TokenSequence random_tokens(std::uint32_t frame, std::size_t n, std::size_t dim, Rng& rng, std::size_t padded = 0) {
  TokenSequence s;
  std::vector<double> f(n * dim, 0.0);
  for (std::size_t i = 0; i < (n - padded) * dim; ++i) f[i] = rng.normal();
  s.features = Tensor::from({n, dim}, f);
  s.frame_index = static_cast<int>(frame);
  for (std::size_t i = 0; i < n; ++i) {
    const bool pad = i >= n - padded;
    s.point_ids.push_back(pad ? kPadId : make_point_id(frame, static_cast<std::uint32_t>(i)));
    s.positions.push_back(pad ? Vec3{} : Vec3{rng.normal(), rng.normal(), rng.normal()});
  }
  return s;
}

// ---- 1: gradients ---------------------------------------------------------------------

Outcome gradient_suite() {
  using In = std::vector<Tensor>;
  struct Check {
    std::string name;
    std::function<testing::GradCheckResult(std::uint64_t)> run;
  };
  std::vector<Check> checks;
  auto simple = [&](std::string name, std::vector<nn::Shape> shapes, std::function<Tensor(const In&)> f) {
    checks.push_back({name, [shapes, f](std::uint64_t seed) {
                        Rng rng(seed);
                        In in;
                        for (const auto& s : shapes) in.push_back(random_leaf(s, rng));
                        return grad_check(in, f, seed);
                      }});
  };
  simple("matmul", {{3, 4}, {4, 5}}, [](const In& x) { return nn::matmul(x[0], x[1]); });
  simple("matmul_transposed", {{3, 4}, {5, 4}}, [](const In& x) { return nn::matmul_transposed(x[0], x[1]); });
  simple("linear", {{3, 4}, {4, 2}, {1, 2}}, [](const In& x) { return nn::linear(x[0], x[1], x[2]); });
  simple("add", {{2, 3}, {2, 3}}, [](const In& x) { return nn::add(x[0], x[1]); });
  simple("sub", {{2, 3}, {2, 3}}, [](const In& x) { return nn::sub(x[0], x[1]); });
  simple("mul", {{2, 3}, {2, 3}}, [](const In& x) { return nn::mul(x[0], x[1]); });
  simple("scale", {{2, 3}}, [](const In& x) { return nn::scale(x[0], -1.7); });
  simple("relu", {{4, 5}}, [](const In& x) { return nn::relu(x[0]); });
  simple("sigmoid", {{4, 5}}, [](const In& x) { return nn::sigmoid(x[0]); });
  simple("softmax_rows", {{4, 5}}, [](const In& x) { return nn::softmax_rows(x[0], {true, false, true, true, false}); });
  simple("softmax_rows_gated", {{3, 4}, {1, 4}}, [](const In& x) { return nn::softmax_rows_gated(x[0], nn::sigmoid(x[1])); });
  simple("layer_norm", {{3, 6}, {1, 6}, {1, 6}}, [](const In& x) { return nn::layer_norm(x[0], x[1], x[2]); });
  simple("slice_cols", {{3, 6}}, [](const In& x) { return nn::slice_cols(x[0], 1, 4); });
  simple("concat_cols", {{3, 2}, {3, 4}}, [](const In& x) {
    std::vector<Tensor> p{x[0], x[1]};
    return nn::concat_cols(p);
  });
  simple("concat_rows", {{2, 3}, {4, 3}}, [](const In& x) {
    std::vector<Tensor> p{x[0], x[1]};
    return nn::concat_rows(p);
  });
  simple("gather_rows", {{5, 3}}, [](const In& x) {
    std::size_t rows[] = {4, 0, 0, 2};
    return nn::gather_rows(x[0], rows);
  });
  simple("repeat_row", {{1, 4}}, [](const In& x) { return nn::repeat_row(x[0], 3); });
  simple("reshape", {{2, 6}}, [](const In& x) { return nn::reshape(x[0], {3, 4}); });
  simple("mask_rows", {{4, 3}}, [](const In& x) { return nn::mask_rows(x[0], {true, false, true, false}); });
  simple("sum", {{3, 3}}, [](const In& x) { return nn::sum(x[0]); });
  simple("max_pool_seq", {{6, 4}}, [](const In& x) { return nn::max_pool_seq(x[0]).pooled; });
  simple("bce_with_logits", {{1, 4}}, [](const In& x) {
    const double t[] = {0.0, 1.0, 0.25, 0.8};
    return nn::bce_with_logits(nn::scale(x[0], 3.0), t);
  });
  simple("smooth_l1", {{1, 5}}, [](const In& x) {
    const double t[] = {0.5, -0.4, 0.02, 1.0, -1.0};
    return nn::smooth_l1(x[0], t, 1.0 / 9.0);
  });

  checks.push_back({"multi_head_attention", [](std::uint64_t seed) {
                      Rng rng(seed);
                      nn::ParameterStore store;
                      auto attn = nn::MultiHeadAttention::create(store, "a", 8, 2, rng);
                      auto q = random_leaf({3, 8}, rng), kv = random_leaf({5, 8}, rng);
                      return grad_check({q, kv, attn.query.weight, attn.key.weight, attn.value.weight, attn.output.weight},
                                        [&](const In& x) {
                                          return nn::multi_head_attention(attn, x[0], x[1], x[1],
                                                                          {true, true, false, true, true})
                                              .out;
                                        },
                                        seed);
                    }});
  checks.push_back({"attend_rows", [](std::uint64_t seed) {
                      Rng rng(seed);
                      nn::ParameterStore store;
                      auto attn = nn::MultiHeadAttention::create(store, "a", 8, 4, rng);
                      auto x0 = random_leaf({6, 8}, rng);
                      return grad_check({x0, attn.key.weight, attn.value.weight},
                                        [&](const In& x) {
                                          auto maps = nn::attention_maps(attn, x[0], x[0], x[0]);
                                          std::size_t rows[] = {1, 4};
                                          return nn::attend_rows(attn, maps, rows);
                                        },
                                        seed);
                    }});
  checks.push_back({"ad_mhsa", [](std::uint64_t seed) {
                      Rng rng(seed);
                      nn::ParameterStore store;
                      auto layer = scaling::AdMhsaLayer::create(store, "l", 8, 2, scaling::Scorer::adaptive, rng);
                      auto seq = random_tokens(0, 10, 8, rng, 2);
                      auto x0 = random_leaf({10, 8}, rng);
                      scaling::ScalingConfig cfg;
                      cfg.heads = 2;
                      return grad_check({x0, layer.attn.query.weight, layer.attn.key.weight, layer.attn.value.weight,
                                         layer.norm.gain, layer.ffn.up.weight},
                                        [&](const In& x) {
                                          auto s = seq;
                                          s.features = nn::mask_rows(x[0], seq.valid_mask());
                                          return scaling::ad_mhsa(layer, s, cfg).out.features;
                                        },
                                        seed);
                    }});
  checks.push_back({"intra_group_fusion", [](std::uint64_t seed) {
                      Rng rng(seed);
                      nn::ParameterStore store;
                      auto igf = fusion::IntraGroupFusion::create(store, "igf", 6, 2, rng);
                      auto a = random_tokens(0, 4, 6, rng), b = random_tokens(1, 4, 6, rng, 1);
                      auto xa = random_leaf({4, 6}, rng), xb = random_leaf({4, 6}, rng);
                      return grad_check({xa, xb, igf.summary.weight, igf.compress.weight, igf.norm.gain},
                                        [&](const In& x) {
                                          auto sa = a, sb = b;
                                          sa.features = x[0];
                                          sb.features = nn::mask_rows(x[1], b.valid_mask());
                                          std::vector<TokenSequence> g{sa, sb};
                                          return igf(g).features;
                                        },
                                        seed);
                    }});
  checks.push_back({"dual_decoder", [](std::uint64_t seed) {
                      Rng rng(seed);
                      nn::ParameterStore store;
                      auto dec = decoder::DualDecoder::create(store, "dec", 8, 2, rng);
                      auto head = decoder::PredictionHead::create(store, "head", 8, rng);
                      auto fs_ = random_tokens(0, 4, 8, rng, 1), fm = random_tokens(1, 6, 8, rng, 2);
                      auto xs = random_leaf({4, 8}, rng), xm = random_leaf({6, 8}, rng);
                      return grad_check({xs, xm, dec.query, dec.single_attn.key.weight, dec.multi_attn.value.weight,
                                         dec.multi_ffn.up.weight, head.regression.first.weight},
                                        [&](const In& x) {
                                          auto s = fs_, m = fm;
                                          s.features = nn::mask_rows(x[0], fs_.valid_mask());
                                          m.features = nn::mask_rows(x[1], fm.valid_mask());
                                          auto q = dec(s, m);
                                          auto out = head(q.multi);
                                          std::vector<Tensor> parts{out.logit, out.residual, q.single};
                                          return nn::concat_cols(parts);
                                        },
                                        seed);
                    }});

  const auto t0 = Clock::now();
  const std::size_t seeds = 10;
  double worst = 0.0;
  std::string worst_name;
  std::size_t failures = 0;
  for (const auto& c : checks) {
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const auto r = c.run(1000 + s);
      if (r.max_rel_err > worst) {
        worst = r.max_rel_err;
        worst_name = c.name;
      }
      if (!(r.max_rel_err <= 1e-5) || r.checked == 0) ++failures;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && secs < 120.0;
  o.detail = std::to_string(checks.size()) + " ops x " + std::to_string(seeds) + " seeds, worst rel err " +
             fmt("%.2e", worst) + " (" + worst_name + "), failures " + std::to_string(failures) + ", " +
             fmt("%.1f", secs) + " s";
  return o;
}

// ---- 2: row-subset oracle ------------------------------------------------------------

Outcome row_subset_oracle() {
  Rng rng(2024);
  double worst = 0.0;
  std::size_t bad_ids = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.index(64);
    const std::size_t heads = std::size_t{1} << rng.index(3);
    const std::size_t dim = heads * (2 + rng.index(4));
    const std::size_t padded = n > 1 ? rng.index(n / 2 + 1) : 0;
    const double beta = rng.uniform(0.1, 1.0);
    nn::ParameterStore store;
    auto layer = scaling::AdMhsaLayer::create(store, "l", dim, heads, scaling::Scorer::adaptive, rng);
    auto seq = random_tokens(0, n, dim, rng, padded);
    scaling::ScalingConfig cfg;
    cfg.heads = heads;
    cfg.keep_ratio = beta;
    auto step = scaling::ad_mhsa(layer, seq, cfg);
    auto full = layer.full_block(seq);
    for (std::size_t r = 0; r < step.kept.size(); ++r) {
      bad_ids += step.out.point_ids[r] != seq.point_ids[step.kept[r]];
      for (std::size_t c = 0; c < dim; ++c)
        worst = std::max(worst, std::abs(step.out.features.at(r, c) - full.at(step.kept[r], c)));
    }
  }
  return {worst <= 1e-12 && bad_ids == 0, "100 sequences, max abs diff " + fmt("%.2e", worst)};
}

// ---- 3: length schedule ----------------------------------------------------------------

Outcome length_schedule() {
  auto cfg = ExperimentConfig::full_scale();
  cfg.scene.min_objects = cfg.scene.max_objects = 1;
  cfg.rpn.fp_rate = 0.0;
  auto model = Model::create(cfg, 3);
  auto scene = generate_scene(cfg, 31);
  auto props = scene_proposals(scene, cfg, 5);
  PipelineOptions opt;
  opt.seed = 9;
  auto res = run_pipeline(*model, scene, props, opt);
  const auto& tel = res.telemetry;

  const std::vector<std::size_t> ssp_expected{192, 96, 48};
  const std::vector<fusion::TraceStep> msp_expected{{16, 24}, {4, 96}, {4, 48}, {1, 192}, {1, 48}};
  auto sim = testing::simulate_msp_schedule(cfg.fusion.T, cfg.fusion.G, cfg.scaling.beta2, cfg.sampling.k(), cfg.k_out());
  bool sim_ok = sim.size() == msp_expected.size();
  for (std::size_t i = 0; sim_ok && i < sim.size(); ++i)
    sim_ok = sim[i].sequences == msp_expected[i].sequences && sim[i].length == msp_expected[i].length;
  const bool plan_ok = fusion::plan_trace(cfg.schedule(), cfg.fusion.T, cfg.sampling.k()) == msp_expected;

  std::ostringstream d;
  d << "ssp [";
  for (std::size_t i = 0; i < tel.ssp_lengths.size(); ++i) d << (i ? "," : "") << tel.ssp_lengths[i];
  d << "] msp [";
  for (std::size_t i = 0; i < tel.msp_trace.size(); ++i)
    d << (i ? " " : "") << tel.msp_trace[i].sequences << 'x' << tel.msp_trace[i].length;
  d << "] refined " << tel.refined;
  const bool ok = tel.refined > 0 && tel.traces_consistent && tel.ssp_lengths == ssp_expected &&
                  tel.msp_trace == msp_expected && sim_ok && plan_ok;
  return {ok, d.str()};
}

// ---- 4: grouping -----------------------------------------------------------------------

Outcome grouping_table() {
  auto plan = fusion::group_split(16, 4, fusion::GroupStrategy::equal_stride);
  const std::vector<std::vector<std::size_t>> expected{{1, 5, 9, 13}, {2, 6, 10, 14}, {3, 7, 11, 15}, {4, 8, 12, 16}};
  std::ostringstream d;
  bool ok = plan.groups.size() == expected.size();
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    d << (g ? " " : "") << '{';
    for (std::size_t i = 0; i < plan.groups[g].size(); ++i) d << (i ? "," : "") << plan.groups[g][i] + 1;
    d << '}';
    std::vector<std::size_t> one_based;
    for (auto v : plan.groups[g]) one_based.push_back(v + 1);
    if (g < expected.size()) ok = ok && one_based == expected[g];
  }
  return {ok, d.str()};
}

// ---- 5: dedup oracle -------------------------------------------------------------------

Outcome dedup_oracle() {
  Rng rng(55);
  std::size_t mismatches = 0, bound_violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.index(400);
    const std::size_t m = 1 + rng.index(16);
    const std::size_t k = 1 + rng.index(32);
    // proposals sample up to 4K rows from overlapping windows of one N-point cloud
    std::vector<geometry::PointSet> samples;
    for (std::size_t p = 0; p < m; ++p) {
      const std::size_t lo = rng.index(n);
      const std::size_t span = 1 + rng.index(n - lo);
      const std::size_t want = std::min(4 * k, span);
      auto rows = rng.sample_without_replacement(span, want);
      geometry::PointSet s(1);
      for (auto r : rows) {
        const auto row = static_cast<std::uint32_t>(lo + r);
        const double e = row * 0.01;
        s.push_back({double(row), 0.0, 0.0}, std::span<const double>(&e, 1), 0.0, make_point_id(0, row));
      }
      while (s.size() < 4 * k) s.push_padding();
      samples.push_back(std::move(s));
    }
    auto unique = memory::assign_unique_ids(samples);
    memory::IndexMatrix selected;
    std::vector<PointId> chosen;
    for (const auto& refs : unique.index) {
      std::vector<std::size_t> real;
      for (std::size_t i = 0; i < refs.size(); ++i)
        if (refs[i] != memory::kNoRow) real.push_back(i);
      const std::size_t keep = std::min(k, real.size());
      std::vector<memory::RowIndex> pick;
      for (auto j : rng.sample_without_replacement(real.size(), keep)) {
        pick.push_back(refs[real[j]]);
        chosen.push_back(unique.points.ids[static_cast<std::size_t>(refs[real[j]])]);
      }
      while (pick.size() < k) pick.push_back(memory::kNoRow);
      selected.push_back(std::move(pick));
    }
    const auto focal = memory::finalize_focal(selected, unique.points);
    mismatches += focal.size() != testing::distinct_count(chosen, kPadId);
    bound_violations += focal.size() > std::min(m * k, n);
  }
  return {mismatches == 0 && bound_violations == 0,
          "1000 patterns, count mismatches " + std::to_string(mismatches) + ", bound violations " +
              std::to_string(bound_violations)};
}

// ---- 6: supervised score ---------------------------------------------------------------

Outcome supervised_score_values() {
  const double eta = 0.2;
  auto f = [&](double a) { return scaling::supervised_score_from_scale(a, eta); };
  const double v07 = f(0.7), v13 = f(1.3), v11 = f(1.1);
  double jump = 0.0;
  for (double a : {0.8, 1.2}) {
    jump = std::max(jump, std::abs(f(a) - f(std::nextafter(a, 0.0))));
    jump = std::max(jump, std::abs(f(a) - f(std::nextafter(a, 2.0))));
    jump = std::max(jump, std::abs(f(a - 1e-10) - f(a + 1e-10)));
  }
  // same values through the point-in-box path: a point on the x axis at a * half-length
  const auto box = geometry::Box7::make({1.0, -2.0, 0.5}, {4.0, 2.0, 1.5}, 0.3);
  auto at_scale = [&](double a) {
    const double c = std::cos(box.yaw), s = std::sin(box.yaw), r = a * box.size.x / 2;
    return scaling::supervised_score({box.center.x + c * r, box.center.y + s * r, box.center.z}, box, eta);
  };
  const double path_err = std::max({std::abs(at_scale(0.7) - 1.0), std::abs(at_scale(1.3)), std::abs(at_scale(1.1) - 0.25)});
  const bool ok = std::abs(v07 - 1.0) <= 1e-12 && std::abs(v13) <= 1e-12 && std::abs(v11 - 0.25) <= 1e-12 &&
                  jump <= 1e-9 && path_err <= 1e-9;
  return {ok, "f(0.7)=" + fmt("%.12g", v07) + " f(1.3)=" + fmt("%.12g", v13) + " f(1.1)=" + fmt("%.12g", v11) +
                  " max jump " + fmt("%.1e", jump)};
}

// ---- 7: IoU oracle ---------------------------------------------------------------------

Outcome iou_oracle() {
  Rng rng(77);
  std::vector<std::pair<geometry::Box7, geometry::Box7>> pairs;
  for (int i = 0; i < 200; ++i) {
    auto a = geometry::Box7::make({rng.uniform(-2, 2), rng.uniform(-2, 2), 0}, {rng.uniform(0.5, 5), rng.uniform(0.5, 3), 1.5},
                                  rng.uniform(-M_PI, M_PI));
    // half the pairs overlap heavily, the rest anywhere nearby
    const double spread = i % 2 ? 0.5 : 3.0;
    auto b = geometry::Box7::make({a.center.x + rng.uniform(-spread, spread), a.center.y + rng.uniform(-spread, spread), 0},
                                  {rng.uniform(0.5, 5), rng.uniform(0.5, 3), 1.5}, rng.uniform(-M_PI, M_PI));
    pairs.emplace_back(a, b);
  }
  std::vector<double> err(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    err[i] = std::abs(geometry::iou_bev(pairs[i].first, pairs[i].second) -
                      testing::monte_carlo_iou(pairs[i].first, pairs[i].second, 1000000, 9000 + i));
  });
  const double worst = *std::max_element(err.begin(), err.end());
  return {worst <= 1e-3, "200 pairs, 1e6 samples each, max abs diff " + fmt("%.2e", worst)};
}

// ---- 8, 11: trained desk model ---------------------------------------------------------

struct DeskRun {
  std::unique_ptr<Model> model;
  std::vector<SyntheticScene> eval_scenes;
  Metrics metrics;
  double train_s = 0.0;
  double total_s = 0.0;
};

DeskRun desk_end_to_end(const ExperimentConfig& cfg) {
  DeskRun out;
  const auto t0 = Clock::now();
  auto train_scenes = generate_dataset(cfg, 0, cfg.scene.train_scenes);
  auto trained = staged_train(train_scenes, cfg);
  out.train_s = seconds_since(t0);
  out.eval_scenes = generate_dataset(cfg, 1, cfg.scene.eval_scenes);
  PipelineOptions opt;
  opt.seed = cfg.seed;
  out.metrics = evaluate_model(*trained.model, out.eval_scenes, opt).metrics;
  out.model = std::move(trained.model);
  out.total_s = seconds_since(t0);
  return out;
}

Outcome end_to_end(const DeskRun& run) {
  const auto& m = run.metrics;
  const double gain = m.mean_iou_after - m.mean_iou_before;
  return {gain >= 0.05 && run.total_s <= 900.0,
          "IoU " + fmt("%.4f", m.mean_iou_before) + " -> " + fmt("%.4f", m.mean_iou_after) + " (gain " +
              fmt("%+.4f", gain) + ", matched " + std::to_string(m.matched) + "), recall@0.7 " +
              fmt("%.3f", m.recall70_before) + " -> " + fmt("%.3f", m.recall70_after) + ", " + fmt("%.0f", run.total_s) +
              " s"};
}

Outcome robustness(const DeskRun& run) {
  const std::vector<double> rates{0.0, 0.1, 0.2, 0.3};
  auto reps = robustness_sweep(*run.model, run.eval_scenes, rates);
  std::ostringstream d;
  bool ok = reps.size() == 8;
  for (const auto& r : reps) {
    const double v = r.metrics.at("iou_after");
    ok = ok && std::isfinite(v);
    d << r.tag << '=' << fmt("%.3f", v) << ' ';
  }
  return {ok, "grid " + std::to_string(reps.size()) + " cells: " + d.str()};
}

// ---- 9: scorer ordering ----------------------------------------------------------------

Outcome scorer_ordering(const ExperimentConfig& base, std::size_t train_scenes, std::size_t eval_scenes) {
  const std::uint64_t seeds[] = {11, 12, 13};
  double adaptive = 0.0, random = 0.0;
  std::ostringstream d;
  for (auto seed : seeds) {
    for (auto scorer : {scaling::Scorer::adaptive, scaling::Scorer::random}) {
      auto cfg = base;
      cfg.seed = seed;
      cfg.scaling.scorer = scorer;
      cfg.scene.train_scenes = train_scenes;
      cfg.scene.eval_scenes = eval_scenes;
      auto rep = train_and_evaluate(cfg, scaling::to_string(scorer));
      (scorer == scaling::Scorer::adaptive ? adaptive : random) += rep.metrics.at("iou_after") / 3.0;
    }
  }
  Outcome o;
  o.pass = adaptive >= random - 0.005;
  o.report_only = adaptive < random && o.pass;
  o.detail = "mean held-out IoU adaptive " + fmt("%.4f", adaptive) + " vs random " + fmt("%.4f", random) + " over 3 seeds (" +
             std::to_string(train_scenes) + " train / " + std::to_string(eval_scenes) + " eval scenes)";
  if (o.report_only) o.detail += "; within 0.005, reported only";
  return o;
}

// ---- 10: efficiency --------------------------------------------------------------------

Outcome efficiency() {
  auto cfg = ExperimentConfig::full_scale();
  auto b = bench_efficiency(cfg, 1);
  const bool ok = b.cells_ratio() >= 2.0 && b.wall_ms_default < b.wall_ms_no_scaling &&
                  b.measured_default <= b.analytic_default && b.measured_no_scaling <= b.analytic_no_scaling;
  return {ok, "attention cells " + std::to_string(b.analytic_default) + " vs " + std::to_string(b.analytic_no_scaling) +
                  " (ratio " + fmt("%.2f", b.cells_ratio()) + ", measured " + std::to_string(b.measured_default) + " vs " +
                  std::to_string(b.measured_no_scaling) + "), wall " + fmt("%.0f", b.wall_ms_default) +
                  " ms vs " + fmt("%.0f", b.wall_ms_no_scaling) + " ms"};
}

// ---- 12: determinism -------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome infer_determinism(const std::string& ftkn, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  std::vector<std::string> files{"predictions.csv", "telemetry.csv"};
  if (ftkn.empty()) {
    // in-process fallback: the same calls the CLI makes
    auto cfg = ExperimentConfig::desk_scale();
    cfg.seed = 5;
    cfg.scene.eval_scenes = 5;
    for (const char* run : {"a", "b"}) {
      auto model = Model::create(cfg, cfg.seed);
      auto scenes = generate_dataset(cfg, 1, cfg.scene.eval_scenes);
      PipelineOptions opt;
      opt.seed = cfg.seed;
      auto r = evaluate_model(*model, scenes, opt);
      write_predictions_csv(work / run / "predictions.csv", r.scene_ids, r.frames, r.metrics);
    }
    files = {"predictions.csv"};
  } else {
    for (const char* run : {"a", "b"}) {
      const std::string cmd = "\"" + ftkn + "\" infer --seed 5 --set scene.eval_scenes=5 --out-dir \"" +
                              (work / run).string() + "\" > \"" + (work / (std::string(run) + ".log")).string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "infer run " + std::string(run) + " failed"};
    }
  }
  std::size_t bytes = 0;
  for (const auto& f : files) {
    const auto a = slurp(work / "a" / f), b = slurp(work / "b" / f);
    if (a.empty() || a != b) return {false, f + " differs or is empty"};
    bytes += a.size();
  }
  return {true, std::to_string(files.size()) + " CSV files identical (" + std::to_string(bytes) + " bytes)" +
                    (ftkn.empty() ? ", in-process" : ", via CLI")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string ftkn_path;
  std::vector<int> only;
  std::string work = (fs::temp_directory_path() / "ftkn_acceptance").string();
  std::size_t ordering_train = 0, ordering_eval = 0;  // 0: desk preset sizes
  app.add_option("--ftkn", ftkn_path, "ftkn executable used for the determinism check");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--work", work, "scratch directory");
  app.add_option("--ordering-train", ordering_train, "training scenes per scorer-ordering run (default: desk preset)");
  app.add_option("--ordering-eval", ordering_eval, "held-out scenes per scorer-ordering run (default: desk preset)");
  CLI11_PARSE(app, argc, argv);
  const auto desk = ExperimentConfig::desk_scale();
  if (ordering_train == 0) ordering_train = desk.scene.train_scenes;
  if (ordering_eval == 0) ordering_eval = desk.scene.eval_scenes;

  auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };

  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    if (!wanted(id)) return;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2d %-22s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "gradient suite", gradient_suite);
  report(2, "row-subset oracle", row_subset_oracle);
  report(3, "length schedule", length_schedule);
  report(4, "grouping", grouping_table);
  report(5, "dedup oracle", dedup_oracle);
  report(6, "supervised score", supervised_score_values);
  report(7, "iou oracle", iou_oracle);

  std::optional<DeskRun> desk_run;
  auto need_desk = [&]() -> const DeskRun& {
    if (!desk_run) desk_run = desk_end_to_end(desk);
    return *desk_run;
  };
  report(8, "desk end-to-end", [&] { return end_to_end(need_desk()); });
  report(9, "scorer ordering", [&] { return scorer_ordering(desk, ordering_train, ordering_eval); });
  report(10, "efficiency", efficiency);
  report(11, "robustness grid", [&] { return robustness(need_desk()); });
  report(12, "infer determinism", [&] { return infer_determinism(ftkn_path, fs::path(work) / "determinism"); });

  std::printf("%s: %d failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
