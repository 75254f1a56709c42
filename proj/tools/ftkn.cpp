// Command-line front end: scene export, training, inference, evaluation and the
// experiment drivers. Every command writes CSV files plus summary.txt to --out-dir.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftkn/errors.hpp"
#include "ftkn/geometry/scene_io.hpp"
#include "ftkn/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace ftkn;
using namespace ftkn::harness;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string preset;
  std::vector<std::string> overrides;  // key=value, value parsed as JSON or taken as a string
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_preset) {
  c.preset = default_preset;
  cmd->add_option("--config", c.config_path, "JSON or TOML settings file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "experiment seed");
  cmd->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--preset", c.preset, "base settings: desk or full")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  cmd->add_option("--set", c.overrides, "override one setting, e.g. --set scaling.scorer=random");
}

ExperimentConfig resolve(const Common& c) {
  auto cfg = c.preset == "full" ? ExperimentConfig::full_scale() : ExperimentConfig::desk_scale();
  if (!c.config_path.empty()) apply_config(cfg, load_config_document(c.config_path));
  for (const auto& kv : c.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    const auto key = kv.substr(0, eq), text = kv.substr(eq + 1);
    auto value = nlohmann::json::parse(text, nullptr, false);
    apply_setting(cfg, key, value.is_discarded() ? nlohmann::json(text) : value);
  }
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

fs::path prepare_out(const Common& c, const ExperimentConfig& cfg) {
  fs::path out(c.out_dir);
  fs::create_directories(out);
  std::ofstream(out / "config.json") << cfg.to_json().dump(2) << '\n';
  return out;
}

std::unique_ptr<Model> load_or_init(const ExperimentConfig& cfg, const std::string& model_path) {
  auto model = Model::create(cfg, cfg.seed);
  if (!model_path.empty()) model->load(model_path);
  return model;
}

void write_telemetry_csv(const fs::path& path, const Telemetry& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "metric,value\n";
  auto row = [&](const char* k, double v) { out << k << ',' << format_number(v) << '\n'; };
  for (std::size_t i = 0; i < t.ssp_lengths.size(); ++i)
    out << "ssp_tokens." << i << ',' << t.ssp_lengths[i] << '\n';
  for (std::size_t i = 0; i < t.msp_trace.size(); ++i)
    out << "msp_step." << i << ',' << t.msp_trace[i].sequences << 'x' << t.msp_trace[i].length << '\n';
  row("attention_cells", static_cast<double>(t.attention_cells));
  row("attention_cells_total", static_cast<double>(t.attention_cells_total));
  row("peak_points_stored", static_cast<double>(t.peak_stored_points));
  row("full_cloud_points", static_cast<double>(t.full_cloud_points));
  row("proposals", static_cast<double>(t.proposals));
  row("refined", static_cast<double>(t.refined));
  row("passthrough", static_cast<double>(t.passthrough));
  row("cold_start_frames", static_cast<double>(t.cold_start_frames));
}

void finish(const fs::path& out, const std::vector<ExperimentReport>& reports) {
  write_summary(out / "summary.txt", reports);
  std::cout << summary_text(reports);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal proposal refinement with adaptive token scaling"};
  app.require_subcommand(1);

  Common g_gen, g_train, g_infer, g_eval, g_bench, g_ablate, g_robust;
  std::string split = "eval";
  std::size_t count = 0;
  auto* gen = app.add_subcommand("generate", "write synthetic scenes to disk");
  add_common(gen, g_gen, "desk");
  gen->add_option("--split", split, "train or eval")->check(CLI::IsMember({"train", "eval"}))->capture_default_str();
  gen->add_option("--count", count, "number of scenes (default: the configured split size)");

  auto* train = app.add_subcommand("train", "staged training, then a checkpoint");
  add_common(train, g_train, "desk");

  std::string infer_model, eval_model, robust_model;
  auto* infer = app.add_subcommand("infer", "refine held-out proposals and dump predictions");
  add_common(infer, g_infer, "desk");
  infer->add_option("--model", infer_model, "checkpoint (default: untrained weights from the seed)");

  auto* eval = app.add_subcommand("eval", "refine held-out proposals and report metrics");
  add_common(eval, g_eval, "desk");
  eval->add_option("--model", eval_model, "checkpoint (default: untrained weights from the seed)");

  std::size_t bench_objects = 1;
  auto* bench = app.add_subcommand("bench", "attention cost, memory and wall time with and without scaling");
  add_common(bench, g_bench, "full");
  bench->add_option("--objects", bench_objects, "objects in the benchmark scene")->capture_default_str();

  std::vector<std::string> groups;
  auto* ablate = app.add_subcommand("ablate", "train and evaluate ablation variants");
  add_common(ablate, g_ablate, "desk");
  ablate->add_option("--group", groups,
                     "components, scorers, frames, strategies, ratios, sampling (default: all)");

  auto* robust = app.add_subcommand("robust", "drop historical points or boxes at inference");
  add_common(robust, g_robust, "desk");
  robust->add_option("--model", robust_model, "checkpoint (default: untrained weights from the seed)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto cfg = resolve(g_gen);
      auto out = prepare_out(g_gen, cfg);
      const std::uint64_t sp = split == "train" ? 0 : 1;
      if (count == 0) count = sp == 0 ? cfg.scene.train_scenes : cfg.scene.eval_scenes;
      auto scenes = generate_dataset(cfg, sp, count);
      fs::create_directories(out / "scenes");
      std::ofstream index(out / "scenes.csv", std::ios::binary | std::ios::trunc);
      index << "file,scene_seed,frames,points,objects\n";
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto name = split + "_" + std::to_string(i) + ".bin";
        geometry::save_frames(out / "scenes" / name, scenes[i].frames);
        std::size_t pts = 0;
        for (const auto& f : scenes[i].frames) pts += f.points.size();
        index << name << ',' << scenes[i].seed << ',' << scenes[i].frames.size() << ',' << pts << ','
              << scenes[i].frames.front().boxes.size() << '\n';
      }
      std::cout << "wrote " << scenes.size() << " scenes to " << (out / "scenes").string() << '\n';
    } else if (*train) {
      auto cfg = resolve(g_train);
      auto out = prepare_out(g_train, cfg);
      auto scenes = generate_dataset(cfg, 0, cfg.scene.train_scenes);
      auto res = staged_train(scenes, cfg, [](std::size_t e, std::size_t s, double l) {
        if (s % 100 == 0) std::fprintf(stderr, "epoch %zu step %zu loss %.4f\n", e, s, l);
      });
      res.model->save(out / "model.ckpt");
      write_loss_csv(out / "loss.csv", res.report.loss_curve);
      write_metrics_csv(out / "metrics.csv", {res.report});
      finish(out, {res.report});
    } else if (*infer || *eval) {
      const bool is_infer = static_cast<bool>(*infer);
      const auto& common = is_infer ? g_infer : g_eval;
      auto cfg = resolve(common);
      auto out = prepare_out(common, cfg);
      auto model = load_or_init(cfg, is_infer ? infer_model : eval_model);
      auto scenes = generate_dataset(cfg, 1, cfg.scene.eval_scenes);
      PipelineOptions opt;
      opt.seed = cfg.seed;
      auto run = evaluate_model(*model, scenes, opt);
      ExperimentReport rep;
      rep.tag = is_infer ? "infer" : "eval";
      rep.seed = cfg.seed;
      add_metrics(rep, run.metrics);
      rep.wall_ms = run.telemetry.wall_ms;
      write_predictions_csv(out / "predictions.csv", run.scene_ids, run.frames, run.metrics);
      write_telemetry_csv(out / "telemetry.csv", run.telemetry);
      if (!is_infer) write_metrics_csv(out / "metrics.csv", {rep});
      finish(out, {rep});
    } else if (*bench) {
      auto cfg = resolve(g_bench);
      auto out = prepare_out(g_bench, cfg);
      auto b = bench_efficiency(cfg, bench_objects);
      auto rep = b.report();
      rep.seed = cfg.seed;
      write_metrics_csv(out / "bench.csv", {rep});
      std::ofstream(out / "summary.txt") << summary_text({rep}) << "wall_ms default " << format_number(b.wall_ms_default)
                                         << "\nwall_ms no_scaling " << format_number(b.wall_ms_no_scaling)
                                         << "\nwall ratio " << format_number(b.wall_ratio()) << '\n';
      std::cout << summary_text({rep}) << "wall ratio " << format_number(b.wall_ratio()) << '\n';
    } else if (*ablate) {
      auto cfg = resolve(g_ablate);
      auto out = prepare_out(g_ablate, cfg);
      auto variants = ablation_variants(groups);
      if (variants.empty()) throw ConfigError("no ablation variants selected");
      auto reps = ablation_suite(cfg, variants, [&](std::size_t i, const Variant& v) {
        std::fprintf(stderr, "[%zu/%zu] %s/%s\n", i + 1, variants.size(), v.group.c_str(), v.tag.c_str());
      });
      write_metrics_csv(out / "ablation.csv", reps);
      finish(out, reps);
    } else if (*robust) {
      auto cfg = resolve(g_robust);
      auto out = prepare_out(g_robust, cfg);
      auto model = load_or_init(cfg, robust_model);
      auto scenes = generate_dataset(cfg, 1, cfg.scene.eval_scenes);
      auto reps = robustness_sweep(*model, scenes);
      std::ofstream grid(out / "robustness.csv", std::ios::binary | std::ios::trunc);
      grid << "drop,rate,iou_before,iou_after,recall70_after,recall50_after\n";
      for (const auto& r : reps) {
        const auto kind = r.tag.substr(0, r.tag.find('@'));
        grid << kind << ',' << format_number(r.metrics.at("rate")) << ',' << format_number(r.metrics.at("iou_before"))
             << ',' << format_number(r.metrics.at("iou_after")) << ',' << format_number(r.metrics.at("recall70_after"))
             << ',' << format_number(r.metrics.at("recall50_after")) << '\n';
      }
      write_metrics_csv(out / "metrics.csv", reps);
      finish(out, reps);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
