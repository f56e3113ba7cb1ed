// Copyright 2026 The DMHE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmhe/config.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dmhe/error.h"
#include "dmhe/json_util.h"
#include "dmhe/model_io.h"

namespace dmhe {

using nlohmann::json;

namespace {

void CheckKeys(const json& j, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T Get(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type (" + j.dump() + ")");
  }
}

bool IsMatrix(const json& j) {
  return j.is_array() && !j.empty() && j[0].is_array();
}

// Number -> c I; matrix -> same block everywhere; array of n numbers or n
// matrices -> per subsystem.
std::vector<Matrix> WeightBlocks(const json& j, const CompositeModel& model,
                                 bool output_sized, const std::string& where) {
  const int n = model.num_subsystems();
  auto dim = [&](int i) {
    return output_sized ? model.block(i).output_dim : model.block(i).state_dim;
  };
  std::vector<Matrix> out;
  if (j.is_number()) {
    for (int i = 0; i < n; ++i) {
      out.push_back(j.get<double>() * Matrix::Identity(dim(i), dim(i)));
    }
    return out;
  }
  if (IsMatrix(j) && !j[0].empty() && j[0][0].is_number()) {
    const Matrix m = MatrixFromJson(j, where);
    for (int i = 0; i < n; ++i) out.push_back(m);
    return out;
  }
  if (j.is_array() && static_cast<int>(j.size()) == n) {
    for (int i = 0; i < n; ++i) {
      const std::string w = where + "[" + std::to_string(i) + "]";
      if (j[i].is_number()) {
        out.push_back(j[i].get<double>() * Matrix::Identity(dim(i), dim(i)));
      } else {
        out.push_back(MatrixFromJson(j[i], w));
      }
    }
    return out;
  }
  throw ConfigError(where +
                    ": expected a number, a matrix, or one entry per subsystem");
}

Vector SigmaFromJson(const json& j, const std::string& where) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  return VectorFromJson(j, where);
}

std::optional<double> OptionalBound(const json& j, const std::string& where) {
  if (j.is_null()) return std::nullopt;
  return Get<double>(j, where);
}

Vector SizedVector(const json& j, Index dim, const std::string& where) {
  const Vector v = VectorFromJson(j, where);
  if (v.size() != dim) {
    throw ConfigError(where + ": expected " + std::to_string(dim) +
                      " entries, got " + std::to_string(v.size()));
  }
  return v;
}

void ResolveModel(RunConfig& c, const json& jm, const std::string& base_dir) {
  c.model_source = "benchmark";
  double divisor = 100.0;
  if (!jm.is_null()) {
    CheckKeys(jm, {"source", "path", "temperature_divisor", "scaling"},
              "model");
    if (jm.contains("source")) {
      c.model_source = Get<std::string>(jm["source"], "model.source");
    }
    if (jm.contains("temperature_divisor")) {
      divisor = Get<double>(jm["temperature_divisor"],
                            "model.temperature_divisor");
    }
  }
  if (c.model_source == "benchmark") {
    if (!(divisor > 0.0)) {
      throw ConfigError("model.temperature_divisor must be positive");
    }
    c.benchmark = LoadBenchmark(divisor);
    c.subsystems = c.benchmark->subsystems;
    c.model = c.benchmark->model;
    c.scaling = c.benchmark->scaling;
  } else if (c.model_source == "file") {
    if (!jm.contains("path")) throw ConfigError("model.path is required");
    std::filesystem::path p = Get<std::string>(jm["path"], "model.path");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    c.subsystems = LoadModelFile(p.string());
    c.model = AssembleComposite(c.subsystems);
    c.benchmark.reset();
    c.scaling = Vector::Ones(c.model->state_dim());
  } else {
    throw ConfigError("model.source must be \"benchmark\" or \"file\"");
  }
  if (!jm.is_null() && jm.contains("scaling")) {
    c.scaling = SizedVector(jm["scaling"], c.model->state_dim(),
                            "model.scaling");
    for (Index j = 0; j < c.scaling.size(); ++j) {
      if (!(c.scaling(j) > 0.0)) {
        throw ConfigError("model.scaling entries must be positive");
      }
    }
    if (c.benchmark) c.benchmark->scaling = c.scaling;
  }
}

}  // namespace

RunConfig DefaultRunConfig() { return ParseRunConfig(json::object()); }

RunConfig ParseRunConfig(const json& doc, const std::string& base_dir) {
  CheckKeys(doc,
            {"model", "schedule", "weights", "boxes", "noise", "initial_state",
             "input", "evaluation", "output_dir", "qp"},
            "config");
  RunConfig c;
  c.source = doc;
  ResolveModel(c, doc.value("model", json()), base_dir);
  const CompositeModel& model = *c.model;
  const Index nx = model.state_dim();

  // schedule
  if (doc.contains("schedule")) {
    const json& js = doc["schedule"];
    CheckKeys(js, {"horizon", "iterations", "mode", "keep_history"},
              "schedule");
    if (js.contains("horizon")) {
      c.schedule.horizon = Get<int>(js["horizon"], "schedule.horizon");
    }
    if (js.contains("iterations")) {
      c.schedule.max_iterations =
          Get<int>(js["iterations"], "schedule.iterations");
    }
    if (js.contains("mode")) {
      c.schedule.mode = ParseMode(Get<std::string>(js["mode"], "schedule.mode"));
    }
    if (js.contains("keep_history")) {
      c.schedule.keep_history =
          Get<bool>(js["keep_history"], "schedule.keep_history");
    }
  }
  c.schedule.Validate();

  // weights
  json jw = doc.value("weights", json::object());
  CheckKeys(jw, {"P", "Q", "R"}, "weights");
  const json p = jw.value("P", json(0.1));
  const json q = jw.value("Q", json(1e-4));
  const json r = jw.value("R", json(1e-4));
  const std::vector<Matrix> pb = WeightBlocks(p, model, false, "weights.P");
  const std::vector<Matrix> qb = WeightBlocks(q, model, false, "weights.Q");
  const std::vector<Matrix> rb = WeightBlocks(r, model, true, "weights.R");
  for (int i = 0; i < model.num_subsystems(); ++i) {
    c.weights.subsystems.push_back({pb[i], qb[i], rb[i]});
  }
  try {
    c.weights.Validate(model);
  } catch (const Error& e) {
    throw ConfigError(std::string("weights: ") + e.what());
  }

  // noise
  c.noise.sigma_w = Vector::Constant(1, 0.01);
  c.noise.sigma_v = Vector::Constant(1, 0.01);
  c.noise.seed = 1;
  if (doc.contains("noise")) {
    const json& jn = doc["noise"];
    CheckKeys(jn, {"sigma_w", "sigma_v", "w_bound", "v_bound", "seed"},
              "noise");
    if (jn.contains("sigma_w")) {
      c.noise.sigma_w = SigmaFromJson(jn["sigma_w"], "noise.sigma_w");
    }
    if (jn.contains("sigma_v")) {
      c.noise.sigma_v = SigmaFromJson(jn["sigma_v"], "noise.sigma_v");
    }
    if (jn.contains("w_bound")) {
      c.noise.w_bound = OptionalBound(jn["w_bound"], "noise.w_bound");
    }
    if (jn.contains("v_bound")) {
      c.noise.v_bound = OptionalBound(jn["v_bound"], "noise.v_bound");
    }
    if (jn.contains("seed")) {
      c.noise.seed = Get<std::uint64_t>(jn["seed"], "noise.seed");
    }
  }
  c.noise.Validate(model);

  // boxes
  if (doc.contains("boxes") && !doc["boxes"].is_null()) {
    const json& jb = doc["boxes"];
    if (jb.is_string()) {
      if (jb.get<std::string>() != "benchmark" || !c.benchmark) {
        throw ConfigError(
            "boxes: the \"benchmark\" preset needs the benchmark model");
      }
      c.boxes = BenchmarkBoxes(*c.benchmark, 0.1);
    } else {
      CheckKeys(jb, {"preset", "w_bound", "subsystems"}, "boxes");
      if (jb.contains("preset")) {
        if (Get<std::string>(jb["preset"], "boxes.preset") != "benchmark" ||
            !c.benchmark) {
          throw ConfigError(
              "boxes.preset: only \"benchmark\" with the benchmark model");
        }
        c.boxes = BenchmarkBoxes(*c.benchmark,
                                 jb.contains("w_bound")
                                     ? Get<double>(jb["w_bound"],
                                                   "boxes.w_bound")
                                     : 0.1);
      } else {
        if (!jb.contains("subsystems") || !jb["subsystems"].is_array()) {
          throw ConfigError("boxes.subsystems: expected an array");
        }
        std::vector<SubsystemBox> list;
        int i = 0;
        for (const json& e : jb["subsystems"]) {
          const std::string w = "boxes.subsystems[" + std::to_string(i) + "]";
          CheckKeys(e, {"x_lower", "x_upper", "w_lower", "w_upper"}, w);
          if (i >= model.num_subsystems()) {
            throw ConfigError("boxes: more entries than subsystems");
          }
          const Index d = model.block(i).state_dim;
          constexpr double kInf = std::numeric_limits<double>::infinity();
          auto side = [&](const char* key, double fill) {
            return e.contains(key)
                       ? SizedVector(e[key], d, w + "." + key)
                       : Vector(Vector::Constant(d, fill));
          };
          list.push_back({side("x_lower", -kInf), side("x_upper", kInf),
                          side("w_lower", -kInf), side("w_upper", kInf)});
          ++i;
        }
        c.boxes = BoxConstraints(std::move(list));
      }
    }
    try {
      c.boxes->Validate(model);
    } catch (const Error& e) {
      throw ConfigError(std::string("boxes: ") + e.what());
    }
  }
  if (c.schedule.mode == Mode::kDmhe2 && !c.boxes) {
    throw ConfigError("schedule.mode dmhe2 requires \"boxes\"");
  }

  // qp
  if (doc.contains("qp")) {
    const json& jq = doc["qp"];
    CheckKeys(jq, {"method", "tolerance", "max_iterations"}, "qp");
    if (jq.contains("method")) {
      const std::string m = Get<std::string>(jq["method"], "qp.method");
      if (m == "accelerated") {
        c.qp.method = BoxQpOptions::Method::kAccelerated;
      } else if (m == "projected_gradient") {
        c.qp.method = BoxQpOptions::Method::kProjectedGradient;
      } else {
        throw ConfigError("qp.method: expected accelerated or "
                          "projected_gradient");
      }
    }
    if (jq.contains("tolerance")) {
      c.qp.tolerance = Get<double>(jq["tolerance"], "qp.tolerance");
    }
    if (jq.contains("max_iterations")) {
      c.qp.max_iterations = Get<int>(jq["max_iterations"], "qp.max_iterations");
    }
    if (!(c.qp.tolerance > 0.0) || c.qp.max_iterations < 1) {
      throw ConfigError("qp: tolerance and max_iterations must be positive");
    }
  }

  // initial state (physical units for the benchmark, model units otherwise)
  if (c.benchmark) {
    c.x0 = Scale(c.benchmark->x0, *c.benchmark);
    c.initial_guess = Scale(c.benchmark->initial_guess, *c.benchmark);
  } else {
    c.x0 = Vector::Zero(nx);
    c.initial_guess = Vector::Zero(nx);
  }
  if (doc.contains("initial_state")) {
    const json& ji = doc["initial_state"];
    CheckKeys(ji, {"x0", "initial_guess", "physical"}, "initial_state");
    const bool physical = ji.value("physical", c.benchmark.has_value());
    if (physical && !c.benchmark) {
      throw ConfigError("initial_state.physical needs the benchmark model");
    }
    auto convert = [&](const Vector& v) {
      return physical ? Scale(v, *c.benchmark) : v;
    };
    if (ji.contains("x0")) {
      c.x0 = convert(SizedVector(ji["x0"], nx, "initial_state.x0"));
    }
    if (ji.contains("initial_guess")) {
      c.initial_guess = convert(
          SizedVector(ji["initial_guess"], nx, "initial_state.initial_guess"));
    }
  }

  c.input = Vector::Zero(model.input_dim());
  if (doc.contains("input")) {
    c.input = SizedVector(doc["input"], model.input_dim(), "input");
  }

  if (doc.contains("evaluation")) {
    const json& je = doc["evaluation"];
    CheckKeys(je, {"runs", "samples", "horizons", "timed"}, "evaluation");
    if (je.contains("runs")) {
      c.evaluation.runs = Get<int>(je["runs"], "evaluation.runs");
    }
    if (je.contains("samples")) {
      c.evaluation.samples = Get<int>(je["samples"], "evaluation.samples");
    }
    if (je.contains("horizons")) {
      c.evaluation.horizons =
          Get<std::vector<int>>(je["horizons"], "evaluation.horizons");
    }
    if (je.contains("timed")) {
      c.evaluation.timed = Get<bool>(je["timed"], "evaluation.timed");
    }
  }
  if (c.evaluation.runs < 1) throw ConfigError("evaluation.runs must be >= 1");
  if (c.evaluation.samples < c.schedule.horizon + 1) {
    throw ConfigError("evaluation.samples must cover at least one window");
  }
  for (int h : c.evaluation.horizons) {
    if (h < 1 || h + 1 > c.evaluation.samples) {
      throw ConfigError("evaluation.horizons: " + std::to_string(h) +
                        " is out of range");
    }
  }

  if (doc.contains("output_dir")) {
    c.output_dir = Get<std::string>(doc["output_dir"], "output_dir");
  }
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const std::filesystem::path p(path);
  return ParseRunConfig(doc, p.has_parent_path() ? p.parent_path().string()
                                                 : std::string("."));
}

json RunConfig::ResolvedJson() const {
  json j;
  j["model_source"] = model_source;
  j["scaling"] = VectorToJson(scaling);
  j["schedule"] = {{"horizon", schedule.horizon},
                   {"iterations", schedule.max_iterations},
                   {"mode", ModeName(schedule.mode)}};
  json w = json::array();
  for (const SubsystemWeights& s : weights.subsystems) {
    w.push_back({{"P", MatrixToJson(s.P)},
                 {"Q", MatrixToJson(s.Q)},
                 {"R", MatrixToJson(s.R)}});
  }
  j["weights"] = w;
  if (boxes) {
    json b = json::array();
    for (int i = 0; i < boxes->num_subsystems(); ++i) {
      const SubsystemBox& s = boxes->subsystem(i);
      b.push_back({{"x_lower", VectorToJson(s.x_lower)},
                   {"x_upper", VectorToJson(s.x_upper)},
                   {"w_lower", VectorToJson(s.w_lower)},
                   {"w_upper", VectorToJson(s.w_upper)}});
    }
    j["boxes"] = b;
  } else {
    j["boxes"] = nullptr;
  }
  j["noise"] = {{"sigma_w", VectorToJson(noise.sigma_w)},
                {"sigma_v", VectorToJson(noise.sigma_v)},
                {"w_bound", noise.w_bound ? json(*noise.w_bound) : json()},
                {"v_bound", noise.v_bound ? json(*noise.v_bound) : json()},
                {"seed", noise.seed}};
  j["x0"] = VectorToJson(x0);
  j["initial_guess"] = VectorToJson(initial_guess);
  j["input"] = VectorToJson(input);
  j["evaluation"] = {{"runs", evaluation.runs},
                     {"samples", evaluation.samples},
                     {"horizons", evaluation.horizons}};
  j["qp"] = {{"method", qp.method == BoxQpOptions::Method::kAccelerated
                            ? "accelerated"
                            : "projected_gradient"},
             {"tolerance", qp.tolerance},
             {"max_iterations", qp.max_iterations}};
  return j;
}

std::string RunConfig::Fingerprint() const {
  const std::string text = ResolvedJson().dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dmhe
