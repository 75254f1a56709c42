#include "ftkn/harness/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ftkn/errors.hpp"

namespace ftkn::harness {

using nlohmann::json;

std::size_t SamplingConfig::k() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(focal) * gamma)));
}

ExperimentConfig ExperimentConfig::desk_scale() {
  ExperimentConfig c;
  c.model.dim = 64;
  c.model.heads = 4;
  c.sampling.focal = 16;
  c.fusion.T = 8;
  c.fusion.G = 4;
  c.scene.train_scenes = 200;
  c.scene.eval_scenes = 50;
  c.train.frames_per_scene = 2;
  return c;
}

scaling::ScalingConfig ExperimentConfig::ssp_scaling() const {
  scaling::ScalingConfig s;
  s.heads = model.heads;
  s.keep_ratio = scaling.beta1;
  s.scorer = scaling.scorer;
  s.layers = scaling.layers;
  s.eta = scaling.eta;
  return s;
}

fusion::FusionSchedule ExperimentConfig::schedule() const {
  auto s = fusion::default_schedule(fusion.T, fusion.G, scaling.beta2, k_out(), fusion.strategy);
  if (fusion.stages) s.stages = *fusion.stages;
  return s;
}

void ExperimentConfig::validate() const {
  if (model.dim == 0 || model.heads == 0 || model.dim % model.heads != 0)
    throw ConfigError("model.dim must be a positive multiple of model.heads");
  if (!(sampling.gamma > 0.0)) throw ConfigError("sampling.gamma must be positive");
  if (sampling.focal == 0 || sampling.oversample == 0) throw ConfigError("sampling sizes must be positive");
  if (fusion.T == 0) throw ConfigError("fusion.T must be at least 1");
  ssp_scaling().validate();
  if (!(scaling.beta2 > 0.0 && scaling.beta2 <= 1.0)) throw ConfigError("scaling.beta2 must lie in (0, 1]");
  fusion::plan_trace(schedule(), fusion.T, sampling.k());
  if (frames_per_scene() < 1) throw ConfigError("scene.frames must be positive");
  if (scene.min_objects > scene.max_objects) throw ConfigError("scene.min_objects exceeds scene.max_objects");
  if (scene.min_points > scene.max_points) throw ConfigError("scene.min_points exceeds scene.max_points");
  if (!(scene.min_range > 0.0 && scene.min_range <= scene.max_range)) throw ConfigError("bad scene range");
  if (!(rpn.recall > 0.0 && rpn.recall <= 1.0)) throw ConfigError("rpn.recall must lie in (0, 1]");
  if (rpn.fp_rate < 0.0) throw ConfigError("rpn.fp_rate must be non-negative");
  if (train.epochs < 1 || train.batch < 1) throw ConfigError("train.epochs and train.batch must be positive");
  if (!(train.lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (train.frames_per_scene < 1 || train.frames_per_scene > frames_per_scene())
    throw ConfigError("train.frames_per_scene must lie in [1, scene frames]");
  for (double r : {robust.point_drop, robust.box_drop})
    if (r < 0.0 || r >= 1.0) throw ConfigError("drop rates must lie in [0, 1)");
}

json ExperimentConfig::to_json() const {
  json stages = json::array();
  for (const auto& s : schedule().stages) stages.push_back({{"scale", s.scale}, {"groups", s.groups}});
  return {
      {"seed", seed},
      {"model", {{"dim", model.dim}, {"heads", model.heads}}},
      {"sampling",
       {{"focal", sampling.focal}, {"oversample", sampling.oversample}, {"gamma", sampling.gamma},
        {"track_iou", sampling.track_iou}}},
      {"scaling",
       {{"beta1", scaling.beta1}, {"beta2", scaling.beta2}, {"layers", scaling.layers},
        {"scorer", scaling::to_string(scaling.scorer)}, {"eta", scaling.eta},
        {"temperature_start", scaling.temperature_start}, {"temperature_end", scaling.temperature_end}}},
      {"fusion",
       {{"T", fusion.T}, {"G", fusion.G}, {"strategy", fusion::to_string(fusion.strategy)}, {"k_out", k_out()},
        {"schedule", stages}}},
      {"scene",
       {{"train_scenes", scene.train_scenes}, {"eval_scenes", scene.eval_scenes}, {"frames", frames_per_scene()},
        {"min_objects", scene.min_objects}, {"max_objects", scene.max_objects}, {"min_range", scene.min_range},
        {"max_range", scene.max_range}, {"reference_range", scene.reference_range},
        {"points_at_reference", scene.points_at_reference}, {"min_points", scene.min_points},
        {"max_points", scene.max_points}, {"clutter_per_m2", scene.clutter_per_m2}, {"extent", scene.extent},
        {"point_noise", scene.point_noise}, {"max_speed", scene.max_speed}, {"motion_noise", scene.motion_noise}}},
      {"rpn",
       {{"sigma_xyz", rpn.sigma_xyz}, {"sigma_size", rpn.sigma_size}, {"sigma_yaw", rpn.sigma_yaw},
        {"sigma_velocity", rpn.sigma_velocity}, {"recall", rpn.recall}, {"fp_rate", rpn.fp_rate}}},
      {"train",
       {{"epochs", train.epochs}, {"batch", train.batch}, {"lr", train.lr}, {"focal_after", train.focal_after},
        {"refresh_after", train.refresh_after}, {"epa", train.epa}, {"epa_threshold", train.epa_threshold},
        {"epa_window", train.epa_window}, {"aux_head", train.aux_head}, {"aux_weight", train.aux_weight},
        {"keep_ratio_weight", train.keep_ratio_weight}, {"supervised_weight", train.supervised_weight},
        {"alpha", train.loss.regression_weight}, {"positive_iou", train.loss.positive_iou},
        {"frames_per_scene", train.frames_per_scene}}},
      {"toggles",
       {{"ssp_decoder", toggles.ssp_decoder}, {"msp_decoder", toggles.msp_decoder}, {"igf", toggles.igf},
        {"motion", toggles.motion}}},
      {"eval", {{"match_iou", eval.match_iou}}},
      {"robust", {{"point_drop", robust.point_drop}, {"box_drop", robust.box_drop}}},
  };
}

namespace {

std::size_t as_count(const std::string& key, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
  throw ConfigError(key + ": expected a non-negative integer");
}

double as_real(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  return v.get<double>();
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) throw ConfigError(key + ": expected true or false");
  return v.get<bool>();
}

std::string as_text(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

std::vector<fusion::FusionSchedule::Stage> as_stages(const std::string& key, const json& v) {
  if (!v.is_array()) throw ConfigError(key + ": expected an array of {scale, groups} tables");
  std::vector<fusion::FusionSchedule::Stage> out;
  for (const auto& e : v) {
    if (!e.is_object() || !e.contains("scale") || !e.contains("groups") || e.size() != 2)
      throw ConfigError(key + ": each stage needs exactly 'scale' and 'groups'");
    out.push_back({as_real(key + ".scale", e["scale"]), as_count(key + ".groups", e["groups"])});
  }
  return out;
}

void flatten(const json& doc, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto key = prefix.empty() ? it.key() : prefix + "." + it.key();
    // the stage list is the one value that is itself structured
    if (it->is_object() && key != "fusion.schedule")
      flatten(*it, key, out);
    else
      out.emplace_back(key, *it);
  }
}

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& key, const json& v) {
  auto count = [&](std::size_t& dst) { dst = as_count(key, v); };
  auto real = [&](double& dst) { dst = as_real(key, v); };
  auto flag = [&](bool& dst) { dst = as_bool(key, v); };

  if (key == "seed") c.seed = as_count(key, v);
  else if (key == "model.dim") count(c.model.dim);
  else if (key == "model.heads") count(c.model.heads);
  else if (key == "sampling.focal" || key == "sampling.K") count(c.sampling.focal);
  else if (key == "sampling.oversample") count(c.sampling.oversample);
  else if (key == "sampling.gamma") real(c.sampling.gamma);
  else if (key == "sampling.track_iou") real(c.sampling.track_iou);
  else if (key == "scaling.beta1") real(c.scaling.beta1);
  else if (key == "scaling.beta2" || key == "fusion.beta2") real(c.scaling.beta2);
  else if (key == "scaling.layers") count(c.scaling.layers);
  else if (key == "scaling.scorer") c.scaling.scorer = scaling::parse_scorer(as_text(key, v));
  else if (key == "scaling.eta") real(c.scaling.eta);
  else if (key == "scaling.temperature_start") real(c.scaling.temperature_start);
  else if (key == "scaling.temperature_end") real(c.scaling.temperature_end);
  else if (key == "fusion.T") count(c.fusion.T);
  else if (key == "fusion.G") count(c.fusion.G);
  else if (key == "fusion.strategy") c.fusion.strategy = fusion::parse_strategy(as_text(key, v));
  else if (key == "fusion.k_out") count(c.fusion.k_out);
  else if (key == "fusion.schedule") c.fusion.stages = as_stages(key, v);
  else if (key == "scene.train_scenes") count(c.scene.train_scenes);
  else if (key == "scene.eval_scenes") count(c.scene.eval_scenes);
  else if (key == "scene.frames") count(c.scene.frames);
  else if (key == "scene.min_objects") count(c.scene.min_objects);
  else if (key == "scene.max_objects") count(c.scene.max_objects);
  else if (key == "scene.min_range") real(c.scene.min_range);
  else if (key == "scene.max_range") real(c.scene.max_range);
  else if (key == "scene.reference_range") real(c.scene.reference_range);
  else if (key == "scene.points_at_reference") real(c.scene.points_at_reference);
  else if (key == "scene.min_points") count(c.scene.min_points);
  else if (key == "scene.max_points") count(c.scene.max_points);
  else if (key == "scene.clutter_per_m2") real(c.scene.clutter_per_m2);
  else if (key == "scene.extent") real(c.scene.extent);
  else if (key == "scene.point_noise") real(c.scene.point_noise);
  else if (key == "scene.max_speed") real(c.scene.max_speed);
  else if (key == "scene.motion_noise") real(c.scene.motion_noise);
  else if (key == "rpn.sigma_xyz") real(c.rpn.sigma_xyz);
  else if (key == "rpn.sigma_size") real(c.rpn.sigma_size);
  else if (key == "rpn.sigma_yaw") real(c.rpn.sigma_yaw);
  else if (key == "rpn.sigma_velocity") real(c.rpn.sigma_velocity);
  else if (key == "rpn.recall") real(c.rpn.recall);
  else if (key == "rpn.fp_rate") real(c.rpn.fp_rate);
  else if (key == "train.epochs") count(c.train.epochs);
  else if (key == "train.batch") count(c.train.batch);
  else if (key == "train.lr") real(c.train.lr);
  else if (key == "train.focal_after") count(c.train.focal_after);
  else if (key == "train.refresh_after") count(c.train.refresh_after);
  else if (key == "train.epa") flag(c.train.epa);
  else if (key == "train.epa_threshold") count(c.train.epa_threshold);
  else if (key == "train.epa_window") count(c.train.epa_window);
  else if (key == "train.aux_head") flag(c.train.aux_head);
  else if (key == "train.aux_weight") real(c.train.aux_weight);
  else if (key == "train.keep_ratio_weight") real(c.train.keep_ratio_weight);
  else if (key == "train.supervised_weight") real(c.train.supervised_weight);
  else if (key == "train.alpha") real(c.train.loss.regression_weight);
  else if (key == "train.positive_iou") real(c.train.loss.positive_iou);
  else if (key == "train.frames_per_scene") count(c.train.frames_per_scene);
  else if (key == "toggles.ssp_decoder") flag(c.toggles.ssp_decoder);
  else if (key == "toggles.msp_decoder") flag(c.toggles.msp_decoder);
  else if (key == "toggles.igf") flag(c.toggles.igf);
  else if (key == "toggles.motion") flag(c.toggles.motion);
  else if (key == "eval.match_iou") real(c.eval.match_iou);
  else if (key == "robust.point_drop") real(c.robust.point_drop);
  else if (key == "robust.box_drop") real(c.robust.box_drop);
  else throw ConfigError("unknown config key '" + key + "'");
}

void apply_config(ExperimentConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be a table");
  std::vector<std::pair<std::string, json>> flat;
  flatten(doc, "", flat);
  for (const auto& [k, v] : flat) apply_setting(cfg, k, v);
}

// ---- TOML subset -----------------------------------------------------------

namespace {

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        auto path = parse_key_path();
        skip_spaces();
        expect(']');
        table = &root;
        for (const auto& part : path) {
          auto& next = (*table)[part];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("'" + part + "' is not a table");
          table = &next;
        }
      } else {
        parse_assignment(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("toml line " + std::to_string(line_) + ": " + msg);
  }
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        newline();
      else
        break;
    }
  }
  // whitespace, comments and newlines inside arrays
  void skip_all() { skip_blank_lines(); }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
    newline();
  }

  std::string parse_simple_key() {
    skip_spaces();
    if (peek() == '"') return parse_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
      k += s_[pos_++];
    if (k.empty()) fail("expected a key");
    return k;
  }
  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_simple_key()};
    skip_spaces();
    while (peek() == '.') {
      ++pos_;
      path.push_back(parse_simple_key());
      skip_spaces();
    }
    return path;
  }

  void parse_assignment(json& table) {
    auto path = parse_key_path();
    skip_spaces();
    expect('=');
    skip_spaces();
    json* dst = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto& next = (*dst)[path[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("'" + path[i] + "' is not a table");
      dst = &next;
    }
    if (dst->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*dst)[path.back()] = parse_value();
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  json parse_value() {
    char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      skip_all();
      while (peek() != ']') {
        arr.push_back(parse_value());
        skip_all();
        if (peek() == ',') {
          ++pos_;
          skip_all();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      ++pos_;
      return arr;
    }
    if (c == '{') {
      ++pos_;
      json obj = json::object();
      skip_spaces();
      if (peek() == '}') {
        ++pos_;
        return obj;
      }
      while (true) {
        parse_assignment(obj);
        skip_spaces();
        if (peek() == ',') {
          ++pos_;
          skip_spaces();
        } else if (peek() == '}') {
          ++pos_;
          return obj;
        } else {
          fail("expected ',' or '}' in inline table");
        }
      }
    }
    std::string word;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || std::string("+-._").find(peek()) != std::string::npos))
      word += s_[pos_++];
    if (word == "true") return true;
    if (word == "false") return false;
    if (word.empty()) fail("expected a value");
    std::string digits;
    for (char ch : word)
      if (ch != '_') digits += ch;
    bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" || digits == "nan";
    try {
      std::size_t used = 0;
      if (is_float) {
        double d = std::stod(digits, &used);
        if (used == digits.size()) return d;
      } else {
        long long i = std::stoll(digits, &used);
        if (used == digits.size()) return i;
      }
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + word + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

json parse_toml(const std::string& text) { return TomlParser(text).parse(); }

json load_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (path.extension() == ".json" || (first != std::string::npos && text[first] == '{')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("bad JSON config: ") + e.what());
    }
  }
  return parse_toml(text);
}

}  // namespace ftkn::harness
