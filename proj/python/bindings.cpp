// Python bindings for the main operations. Configurations cross the boundary as
// JSON text; the Python package wraps them as dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ftkn/errors.hpp"
#include "ftkn/fusion/grouping.hpp"
#include "ftkn/fusion/schedule.hpp"
#include "ftkn/geometry/iou.hpp"
#include "ftkn/harness/experiments.hpp"
#include "ftkn/harness/scene_gen.hpp"
#include "ftkn/memory/dedup.hpp"
#include "ftkn/scaling/scorers.hpp"

namespace py = pybind11;
using namespace ftkn;
using namespace ftkn::harness;

namespace {

ExperimentConfig make_config(const std::string& preset, const std::string& overrides) {
  auto cfg = preset == "full" ? ExperimentConfig::full_scale() : ExperimentConfig::desk_scale();
  if (preset != "full" && preset != "desk") throw ConfigError("unknown preset '" + preset + "'");
  if (!overrides.empty()) apply_config(cfg, nlohmann::json::parse(overrides));
  cfg.validate();
  return cfg;
}

geometry::Box7 to_box(const std::vector<double>& v) {
  if (v.size() != 7) throw DimensionError("a box is 7 numbers: x, y, z, l, w, h, yaw");
  return geometry::Box7::make({v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6]);
}

std::vector<double> from_box(const geometry::Box7& b) {
  return {b.center.x, b.center.y, b.center.z, b.size.x, b.size.y, b.size.z, b.yaw};
}

std::map<std::string, double> metrics_map(const Metrics& m) {
  ExperimentReport r;
  add_metrics(r, m);
  return {r.metrics.begin(), r.metrics.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Temporal proposal refinement with adaptive token scaling";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  m.def("config_json", [](const std::string& preset, const std::string& overrides) {
    return make_config(preset, overrides).to_json().dump();
  }, py::arg("preset") = "desk", py::arg("overrides") = "");

  m.def("iou_bev", [](const std::vector<double>& a, const std::vector<double>& b) {
    return geometry::iou_bev(to_box(a), to_box(b));
  }, py::arg("a"), py::arg("b"));

  m.def("supervised_score", &scaling::supervised_score_from_scale, py::arg("scale"), py::arg("eta") = 0.2);

  m.def("group_split", [](std::size_t T, std::size_t G, const std::string& strategy) {
    return fusion::group_split(T, G, fusion::parse_strategy(strategy)).groups;
  }, py::arg("T"), py::arg("G"), py::arg("strategy") = "equal_stride");

  m.def("fusion_trace", [](const std::string& preset, const std::string& overrides) {
    const auto cfg = make_config(preset, overrides);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& s : fusion::plan_trace(cfg.schedule(), cfg.fusion.T, cfg.sampling.k()))
      out.emplace_back(s.sequences, s.length);
    return out;
  }, py::arg("preset") = "full", py::arg("overrides") = "");

  m.def("unique_point_count", [](const std::vector<std::vector<std::int64_t>>& proposals) {
    std::vector<geometry::PointSet> samples;
    for (const auto& ids : proposals) {
      geometry::PointSet s(1);
      for (auto id : ids) {
        if (id < 0) {
          s.push_padding();
          continue;
        }
        const double e = 0.0;
        s.push_back({0, 0, 0}, std::span<const double>(&e, 1), 0.0, id);
      }
      samples.push_back(std::move(s));
    }
    return memory::assign_unique_ids(samples).points.size();
  }, py::arg("proposals"), "Distinct ids across per-proposal samples; negative ids are padding.");

  m.def("generate_scene", [](const std::string& preset, const std::string& overrides, std::uint64_t seed) {
    const auto cfg = make_config(preset, overrides);
    auto scene = generate_scene(cfg, seed);
    py::list frames;
    for (const auto& f : scene.frames) {
      py::dict d;
      std::vector<std::vector<double>> pts;
      pts.reserve(f.points.size());
      for (std::size_t i = 0; i < f.points.size(); ++i)
        pts.push_back({f.points.coords[i].x, f.points.coords[i].y, f.points.coords[i].z, f.points.extra(i)[0]});
      std::vector<std::vector<double>> boxes;
      for (const auto& b : f.boxes) boxes.push_back(from_box(b));
      d["points"] = pts;
      d["boxes"] = boxes;
      frames.append(d);
    }
    return frames;
  }, py::arg("preset") = "desk", py::arg("overrides") = "", py::arg("seed") = 0);

  m.def("analytic_attention_cells", [](const std::string& preset, const std::string& overrides, bool no_scaling) {
    auto cfg = make_config(preset, overrides);
    return analytic_attention_cells(no_scaling ? no_scaling_variant(cfg) : cfg);
  }, py::arg("preset") = "full", py::arg("overrides") = "", py::arg("no_scaling") = false);

  m.def("infer", [](const std::string& preset, const std::string& overrides) {
    const auto cfg = make_config(preset, overrides);
    py::gil_scoped_release release;
    auto model = Model::create(cfg, cfg.seed);
    auto scenes = generate_dataset(cfg, 1, cfg.scene.eval_scenes);
    PipelineOptions opt;
    opt.seed = cfg.seed;
    auto run = evaluate_model(*model, scenes, opt);
    return metrics_map(run.metrics);
  }, py::arg("preset") = "desk", py::arg("overrides") = "",
     "Refines the held-out split with untrained weights and returns its metrics.");

  m.def("train_and_evaluate", [](const std::string& preset, const std::string& overrides) {
    const auto cfg = make_config(preset, overrides);
    py::gil_scoped_release release;
    auto r = train_and_evaluate(cfg, "python");
    return std::map<std::string, double>(r.metrics.begin(), r.metrics.end());
  }, py::arg("preset") = "desk", py::arg("overrides") = "");

  m.def("bench", [](const std::string& preset, const std::string& overrides, std::size_t objects) {
    const auto cfg = make_config(preset, overrides);
    py::gil_scoped_release release;
    auto b = bench_efficiency(cfg, objects);
    auto r = b.report();
    std::map<std::string, double> out(r.metrics.begin(), r.metrics.end());
    out["wall_ms.default"] = b.wall_ms_default;
    out["wall_ms.no_scaling"] = b.wall_ms_no_scaling;
    return out;
  }, py::arg("preset") = "full", py::arg("overrides") = "", py::arg("objects") = 1);
}
