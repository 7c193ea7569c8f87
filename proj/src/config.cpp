/*
 * Copyright 2026 The dsml Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dsml/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include "json.hpp"
#include <sstream>

#include "dsml/demo.hpp"
#include "dsml/errors.hpp"
#include "dsml/rng.hpp"

namespace dsml {

using nlohmann::json;

namespace {

bool same(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool same(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

// Maps JSON pointers of object keys and array elements to source lines.
class KeyLines {
 public:
  explicit KeyLines(const std::string& text) { scan(text); }

  int line(std::string pointer) const {
    while (true) {
      if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
      const auto cut = pointer.rfind('/');
      if (cut == std::string::npos || pointer.empty()) return 1;
      pointer.resize(cut);
    }
  }

 private:
  struct Frame {
    bool object;
    std::string pointer;
    std::string pending;
    int index;
  };

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out += c;
    }
    return out;
  }

  void scan(const std::string& text) {
    std::vector<Frame> stack;
    int line = 1;
    bool expect_key = false;
    bool element_start = false;
    auto element = [&]() -> std::string {
      const Frame& top = stack.back();
      return top.pointer + "/" + std::to_string(top.index);
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (c == '\n') {
        ++line;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') continue;
      if (element_start && c != ']' && !stack.empty() && !stack.back().object)
        lines_.emplace(element(), line);
      element_start = false;
      if (c == '"') {
        const int start_line = line;
        std::string s;
        for (++i; i < text.size() && text[i] != '"'; ++i) {
          if (text[i] == '\\' && i + 1 < text.size()) ++i;
          if (text[i] == '\n') ++line;
          s += text[i];
        }
        if (!stack.empty() && stack.back().object && expect_key) {
          Frame& top = stack.back();
          top.pending = top.pointer + "/" + escape(s);
          lines_.emplace(top.pending, start_line);
          expect_key = false;
        }
      } else if (c == '{' || c == '[') {
        std::string pointer;
        if (!stack.empty()) pointer = stack.back().object ? stack.back().pending : element();
        stack.push_back({c == '{', pointer, {}, 0});
        expect_key = c == '{';
        element_start = c == '[';
      } else if (c == '}' || c == ']') {
        if (!stack.empty()) stack.pop_back();
      } else if (c == ',') {
        if (stack.empty()) continue;
        if (stack.back().object) {
          expect_key = true;
        } else {
          ++stack.back().index;
          element_start = true;
        }
      }
    }
  }

  std::map<std::string, int> lines_;
};

std::string dotted(const std::string& pointer) {
  std::string out;
  std::size_t pos = 1;
  while (pos <= pointer.size() && !pointer.empty()) {
    const auto next = pointer.find('/', pos);
    const std::string token = pointer.substr(pos, next == std::string::npos ? std::string::npos
                                                                             : next - pos);
    if (!token.empty() && token.find_first_not_of("0123456789") == std::string::npos)
      out += "[" + token + "]";
    else
      out += (out.empty() ? "" : ".") + token;
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out.empty() ? "<root>" : out;
}

std::string pointer_of(const std::string& path) {
  std::string out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out += "/" + token;
    token.clear();
  };
  for (char c : path) {
    if (c == '.' || c == '[' || c == ']')
      flush();
    else
      token += c;
  }
  flush();
  return out;
}

struct Context {
  std::string source;
  KeyLines lines;
};

class Reader {
 public:
  Reader(const json& value, std::string pointer, const Context& ctx)
      : value_(&value), pointer_(std::move(pointer)), ctx_(&ctx) {}

  [[noreturn]] void fail(const std::string& message, const std::string& at = {}) const {
    const std::string where = at.empty() ? pointer_ : at;
    throw ConfigError(ctx_->source + ":" + std::to_string(ctx_->lines.line(where)) + ": " +
                      dotted(where) + ": " + message);
  }

  void expect_object() const {
    if (!value_->is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    expect_object();
    for (const auto& item : value_->items()) {
      bool known = false;
      for (const char* k : keys) known = known || item.key() == k;
      if (!known) fail("unknown key '" + item.key() + "'", pointer_ + "/" + item.key());
    }
  }

  bool has(const char* key) const { return value_->contains(key); }

  Reader child(const char* key) const {
    if (!has(key)) fail(std::string("missing required key '") + key + "'");
    return Reader(value_->at(key), pointer_ + "/" + key, *ctx_);
  }

  std::size_t size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  Reader at(std::size_t i) const {
    return Reader(value_->at(i), pointer_ + "/" + std::to_string(i), *ctx_);
  }

  double number() const {
    if (!value_->is_number()) fail("expected a number");
    return value_->get<double>();
  }

  int integer() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    const auto v = value_->get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      fail("integer out of range");
    return static_cast<int>(v);
  }

  std::uint64_t unsigned_integer() const {
    if (!value_->is_number_unsigned()) fail("expected a non-negative integer");
    return value_->get<std::uint64_t>();
  }

  bool boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
  }

  std::string string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }

  std::string choice(std::initializer_list<const char*> options) const {
    const std::string s = string();
    for (const char* o : options)
      if (s == o) return s;
    std::string list;
    for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
    fail("unknown value '" + s + "' (expected one of: " + list + ")");
  }

  Vector vector() const {
    Vector out(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < value_->size(); ++i)
      out[static_cast<Eigen::Index>(i)] = at(i).number();
    return out;
  }

  std::vector<double> doubles() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }

  std::vector<int> integers() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).integer());
    return out;
  }

  Matrix matrix() const {
    const std::size_t rows = size();
    if (rows == 0) return Matrix(0, 0);
    const std::size_t cols = at(0).size();
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      const Reader row = at(r);
      if (row.size() != cols) row.fail("ragged matrix row");
      for (std::size_t c = 0; c < cols; ++c)
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.at(c).number();
    }
    return out;
  }

 private:
  const json* value_;
  std::string pointer_;
  const Context* ctx_;
};

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
  return out;
}

// ---- reading ----

ReferenceConfig read_reference(const Reader& r) {
  r.allow({"type", "value"});
  ReferenceConfig out;
  out.type = r.child("type").choice({"demo-1", "demo-2", "demo-3", "constant"});
  if (out.type == "constant") out.value = r.child("value").vector();
  else if (r.has("value")) r.fail("'value' is only used by constant references");
  return out;
}

ControllerConfig read_controller(const Reader& r) {
  r.allow({"type", "reference", "reference_lead", "gain"});
  ControllerConfig out;
  out.type = r.child("type").choice({"feedback-linearizing", "zero", "gain"});
  if (out.type == "feedback-linearizing") {
    out.reference = read_reference(r.child("reference"));
    if (r.has("reference_lead")) out.reference_lead = r.child("reference_lead").integer();
  } else if (r.has("reference") || r.has("reference_lead")) {
    r.fail("reference settings are only used by feedback-linearizing controllers");
  }
  if (out.type == "gain") out.gain = r.child("gain").number();
  else if (r.has("gain")) r.fail("'gain' is only used by gain controllers");
  return out;
}

ConstraintConfig read_constraint(const Reader& r) {
  r.allow({"type", "reference", "index", "center", "bound"});
  ConstraintConfig out;
  out.type = r.child("type").choice(
      {"demo-tracking", "demo-x1-bound", "abs-bound", "always-satisfied", "always-violated"});
  if (out.type == "demo-tracking") out.reference = read_reference(r.child("reference"));
  if (out.type == "abs-bound") {
    out.index = r.child("index").integer();
    out.center = r.child("center").number();
    out.bound = r.child("bound").number();
  }
  const bool uses_reference = out.type == "demo-tracking";
  const bool uses_bound = out.type == "abs-bound";
  if ((!uses_reference && r.has("reference")) ||
      (!uses_bound && (r.has("index") || r.has("center") || r.has("bound"))))
    r.fail("setting not used by constraint type '" + out.type + "'");
  return out;
}

InitialStateConfig read_initial_state(const Reader& r) {
  r.allow({"policy", "value", "lower", "upper"});
  InitialStateConfig out;
  out.policy = r.child("policy").choice({"fixed", "uniform"});
  if (out.policy == "fixed") {
    out.value = r.child("value").vector();
    if (r.has("lower") || r.has("upper")) r.fail("fixed initial states take only 'value'");
  } else {
    out.lower = r.child("lower").vector();
    out.upper = r.child("upper").vector();
    if (r.has("value")) r.fail("uniform initial states take 'lower' and 'upper'");
  }
  return out;
}

TaskConfig read_task(const Reader& r, int position) {
  r.allow({"id", "controller", "constraints", "initial_state"});
  TaskConfig out;
  out.id = r.has("id") ? r.child("id").integer() : position + 1;
  out.controller = read_controller(r.child("controller"));
  const Reader list = r.child("constraints");
  for (std::size_t i = 0; i < list.size(); ++i) out.constraints.push_back(read_constraint(list.at(i)));
  out.initial_state = read_initial_state(r.child("initial_state"));
  return out;
}

SystemConfig read_system(const Reader& r) {
  SystemConfig out;
  r.expect_object();
  out.preset = r.child("preset").choice({"paper-demo", "linear"});
  if (out.preset == "paper-demo") {
    r.allow({"preset", "dynamics_variant", "noise_scale"});
    out.dynamics_variant = r.has("dynamics_variant")
                               ? r.child("dynamics_variant").choice({"logistic", "literal"})
                               : "logistic";
    out.state_dim = 2;
    out.input_dim = 2;
    out.unknown = "demo";
  } else {
    r.allow({"preset", "state_dim", "input_dim", "a", "b", "unknown", "unknown_matrix",
             "noise_scale"});
    out.dynamics_variant.clear();
    out.state_dim = r.child("state_dim").integer();
    out.input_dim = r.child("input_dim").integer();
    out.a = r.child("a").matrix();
    out.b = r.child("b").matrix();
    out.unknown = r.has("unknown") ? r.child("unknown").choice({"zero", "linear"}) : "zero";
    if (out.unknown == "linear") out.unknown_matrix = r.child("unknown_matrix").matrix();
    else if (r.has("unknown_matrix")) r.fail("'unknown_matrix' requires unknown = linear");
  }
  out.noise_scale = r.child("noise_scale").matrix();
  return out;
}

PriorDataConfig read_prior(const Reader& r) {
  r.expect_object();
  PriorDataConfig out;
  out.source = r.child("source").choice({"none", "random-uniform", "inline"});
  if (out.source == "none") {
    r.allow({"source"});
  } else if (out.source == "random-uniform") {
    r.allow({"source", "count", "lower", "upper"});
    out.count = r.child("count").integer();
    out.lower = r.child("lower").vector();
    out.upper = r.child("upper").vector();
  } else {
    r.allow({"source", "points", "values"});
    const Reader pts = r.child("points");
    for (std::size_t i = 0; i < pts.size(); ++i) out.points.push_back(pts.at(i).vector());
    out.values = r.child("values").matrix();
    out.count = static_cast<int>(out.points.size());
  }
  return out;
}

GPConfig read_gp(const Reader& r) {
  r.allow({"signal_variance", "lengthscales", "noise_variance", "input_projection", "prior_data"});
  GPConfig out;
  out.kernel.signal_variance = r.child("signal_variance").number();
  out.kernel.lengthscales = r.child("lengthscales").doubles();
  out.kernel.noise_variance = r.child("noise_variance").number();
  out.kernel.input_projection = r.child("input_projection").integers();
  if (r.has("prior_data")) out.prior_data = read_prior(r.child("prior_data"));
  return out;
}

void read_planner(const Reader& r, RunConfig& cfg) {
  r.allow({"delta", "samples", "max_N", "restarts", "warm_start", "warm_start_candidates",
           "optimizer", "region", "seed", "repetitions"});
  PlannerConfig& p = cfg.planner;
  if (r.has("delta")) p.delta = r.child("delta").number();
  if (r.has("samples")) p.samples = r.child("samples").integer();
  if (r.has("max_N")) p.max_N = r.child("max_N").integer();
  if (r.has("restarts")) p.restarts = r.child("restarts").integer();
  if (r.has("warm_start")) p.warm_start = r.child("warm_start").boolean();
  if (r.has("warm_start_candidates"))
    p.warm_start_candidates = r.child("warm_start_candidates").integer();
  if (r.has("seed")) p.seed = r.child("seed").unsigned_integer();
  if (r.has("repetitions")) cfg.repetitions = r.child("repetitions").integer();
  if (r.has("optimizer")) {
    const Reader o = r.child("optimizer");
    o.allow({"step_size", "max_iterations", "tolerance", "patience"});
    if (o.has("step_size")) p.optimizer.step_size = o.child("step_size").number();
    if (o.has("max_iterations")) p.optimizer.max_iterations = o.child("max_iterations").integer();
    if (o.has("tolerance")) p.optimizer.tolerance = o.child("tolerance").number();
    if (o.has("patience")) p.optimizer.patience = o.child("patience").integer();
  }
  const Reader region = r.child("region");
  region.allow({"lower", "upper"});
  p.region.lower = region.child("lower").vector();
  p.region.upper = region.child("upper").vector();
}

// ---- writing ----

json write_reference(const ReferenceConfig& ref) {
  json out{{"type", ref.type}};
  if (ref.type == "constant") out["value"] = to_json(ref.value);
  return out;
}

json write_task(const TaskConfig& t) {
  json controller{{"type", t.controller.type}};
  if (t.controller.type == "feedback-linearizing") {
    controller["reference"] = write_reference(t.controller.reference);
    controller["reference_lead"] = t.controller.reference_lead;
  }
  if (t.controller.type == "gain") controller["gain"] = t.controller.gain;
  json constraints = json::array();
  for (const auto& c : t.constraints) {
    json entry{{"type", c.type}};
    if (c.type == "demo-tracking") entry["reference"] = write_reference(c.reference);
    if (c.type == "abs-bound") {
      entry["index"] = c.index;
      entry["center"] = c.center;
      entry["bound"] = c.bound;
    }
    constraints.push_back(entry);
  }
  json initial{{"policy", t.initial_state.policy}};
  if (t.initial_state.policy == "fixed") {
    initial["value"] = to_json(t.initial_state.value);
  } else {
    initial["lower"] = to_json(t.initial_state.lower);
    initial["upper"] = to_json(t.initial_state.upper);
  }
  return json{{"id", t.id},
              {"controller", controller},
              {"constraints", constraints},
              {"initial_state", initial}};
}

json write_system(const SystemConfig& s) {
  json out{{"preset", s.preset}};
  if (s.preset == "paper-demo") {
    out["dynamics_variant"] = s.dynamics_variant;
  } else {
    out["state_dim"] = s.state_dim;
    out["input_dim"] = s.input_dim;
    out["a"] = to_json(s.a);
    out["b"] = to_json(s.b);
    out["unknown"] = s.unknown;
    if (s.unknown == "linear") out["unknown_matrix"] = to_json(s.unknown_matrix);
  }
  out["noise_scale"] = to_json(s.noise_scale);
  return out;
}

json write_prior(const PriorDataConfig& p) {
  json out{{"source", p.source}};
  if (p.source == "random-uniform") {
    out["count"] = p.count;
    out["lower"] = to_json(p.lower);
    out["upper"] = to_json(p.upper);
  } else if (p.source == "inline") {
    json pts = json::array();
    for (const auto& x : p.points) pts.push_back(to_json(x));
    out["points"] = pts;
    out["values"] = to_json(p.values);
  }
  return out;
}

void check_size(const Vector& v, Eigen::Index n, const std::string& path) {
  if (v.size() != n)
    throw ConfigError(path + ": expected " + std::to_string(n) + " entries, got " +
                      std::to_string(v.size()));
}

void check_box(const Vector& lower, const Vector& upper, Eigen::Index n, const std::string& path) {
  check_size(lower, n, path + ".lower");
  check_size(upper, n, path + ".upper");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] < upper[i]))
      throw ConfigError(path + ": lower must be below upper and finite");
}

void check_reference(const ReferenceConfig& ref, int dx, const std::string& path) {
  if (ref.type == "constant") {
    check_size(ref.value, dx, path + ".value");
    if (!ref.value.allFinite()) throw ConfigError(path + ".value: must be finite");
  } else if (dx != 2) {
    throw ConfigError(path + ": demo references need a 2-dimensional state");
  }
}

demo::Reference make_reference(const ReferenceConfig& ref) {
  if (ref.type == "constant") return [value = ref.value](int) { return value; };
  const int task = ref.type.back() - '0';
  return [task](int t) { return demo::reference_trajectory(task, t); };
}

ControlLaw make_controller(const ControllerConfig& c, int state_dim, int input_dim) {
  if (c.type == "feedback-linearizing")
    return demo::feedback_linearizing(make_reference(c.reference), c.reference_lead, input_dim);
  if (c.type == "gain")
    return [k = c.gain](const Vector& x, const MultiGP&, int) -> Vector { return -k * x; };
  (void)state_dim;
  return [input_dim](const Vector&, const MultiGP&, int) -> Vector {
    return Vector::Zero(input_dim);
  };
}

ConstraintFn make_constraints(const std::vector<ConstraintConfig>& list, int state_dim) {
  std::vector<ConstraintFn> parts;
  for (const auto& c : list) {
    if (c.type == "demo-tracking") {
      parts.push_back([ref = make_reference(c.reference), state_dim](const Vector& aug, int t) {
        return Vector::Constant(
            1, (aug.head(state_dim) - ref(t)).norm() - demo::tracking_bound(t));
      });
    } else if (c.type == "demo-x1-bound") {
      parts.push_back([](const Vector& aug, int) {
        return Vector::Constant(1, std::abs(aug[0]) - 2.5);
      });
    } else if (c.type == "abs-bound") {
      parts.push_back([c](const Vector& aug, int) {
        return Vector::Constant(1, std::abs(aug[c.index] - c.center) - c.bound);
      });
    } else {
      const double v = c.type == "always-satisfied" ? -1.0 : 1.0;
      parts.push_back([v](const Vector&, int) { return Vector::Constant(1, v); });
    }
  }
  return [parts](const Vector& aug, int t) {
    Vector out(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = parts[i](aug, t)[0];
    return out;
  };
}

}  // namespace

bool ReferenceConfig::operator==(const ReferenceConfig& o) const {
  return type == o.type && same(value, o.value);
}

bool ControllerConfig::operator==(const ControllerConfig& o) const {
  return type == o.type && reference == o.reference && reference_lead == o.reference_lead &&
         gain == o.gain;
}

bool ConstraintConfig::operator==(const ConstraintConfig& o) const {
  return type == o.type && reference == o.reference && index == o.index && center == o.center &&
         bound == o.bound;
}

bool InitialStateConfig::operator==(const InitialStateConfig& o) const {
  return policy == o.policy && same(value, o.value) && same(lower, o.lower) &&
         same(upper, o.upper);
}

bool SystemConfig::operator==(const SystemConfig& o) const {
  return preset == o.preset && dynamics_variant == o.dynamics_variant &&
         state_dim == o.state_dim && input_dim == o.input_dim && same(a, o.a) && same(b, o.b) &&
         unknown == o.unknown && same(unknown_matrix, o.unknown_matrix) &&
         same(noise_scale, o.noise_scale);
}

bool PriorDataConfig::operator==(const PriorDataConfig& o) const {
  return source == o.source && count == o.count && same(lower, o.lower) && same(upper, o.upper) &&
         same(points, o.points) && same(values, o.values);
}

bool operator==(const PlannerConfig& a, const PlannerConfig& b) {
  return a.delta == b.delta && a.samples == b.samples && a.max_N == b.max_N &&
         a.restarts == b.restarts && a.warm_start == b.warm_start &&
         a.warm_start_candidates == b.warm_start_candidates && a.optimizer == b.optimizer &&
         same(a.region.lower, b.region.lower) && same(a.region.upper, b.region.upper) &&
         a.seed == b.seed;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return name == o.name && system == o.system && horizon == o.horizon && tasks == o.tasks &&
         gp == o.gp && planner == o.planner && repetitions == o.repetitions && output == o.output;
}

void RunConfig::validate() const {
  const SystemConfig& s = system;
  const int dx = s.state_dim;
  const int du = s.input_dim;
  if (dx < 1 || du < 0) throw ConfigError("system: invalid dimensions");
  if (s.preset == "paper-demo") {
    if (s.dynamics_variant != "logistic" && s.dynamics_variant != "literal")
      throw ConfigError("system.dynamics_variant: expected logistic or literal");
  } else if (s.preset == "linear") {
    if (s.a.rows() != dx || s.a.cols() != dx) throw ConfigError("system.a: must be state_dim x state_dim");
    if (s.b.rows() != dx || s.b.cols() != du) throw ConfigError("system.b: must be state_dim x input_dim");
    if (!s.a.allFinite() || !s.b.allFinite()) throw ConfigError("system: matrices must be finite");
    if (s.unknown == "linear" &&
        (s.unknown_matrix.rows() != dx || s.unknown_matrix.cols() != dx + du ||
         !s.unknown_matrix.allFinite()))
      throw ConfigError("system.unknown_matrix: must be finite, state_dim x (state_dim + input_dim)");
    if (s.unknown != "zero" && s.unknown != "linear")
      throw ConfigError("system.unknown: expected zero or linear");
  } else {
    throw ConfigError("system.preset: unknown preset '" + s.preset + "'");
  }
  if (s.noise_scale.rows() != dx || s.noise_scale.cols() != dx || !s.noise_scale.allFinite())
    throw ConfigError("system.noise_scale: must be a finite state_dim x state_dim matrix");
  if (horizon < 1) throw ConfigError("horizon: must be at least 1");
  if (tasks.empty()) throw ConfigError("tasks: at least one task is required");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const TaskConfig& t = tasks[i];
    const std::string path = "tasks[" + std::to_string(i) + "]";
    const ControllerConfig& c = t.controller;
    if (c.type == "feedback-linearizing") {
      if (du != dx) throw ConfigError(path + ".controller: feedback linearization needs input_dim == state_dim");
      check_reference(c.reference, dx, path + ".controller.reference");
    } else if (c.type == "gain") {
      if (du != dx) throw ConfigError(path + ".controller: gain control needs input_dim == state_dim");
      if (!std::isfinite(c.gain)) throw ConfigError(path + ".controller.gain: must be finite");
    } else if (c.type != "zero") {
      throw ConfigError(path + ".controller.type: unknown controller '" + c.type + "'");
    }
    if (t.constraints.empty()) throw ConfigError(path + ".constraints: at least one constraint is required");
    for (std::size_t k = 0; k < t.constraints.size(); ++k) {
      const ConstraintConfig& con = t.constraints[k];
      const std::string cpath = path + ".constraints[" + std::to_string(k) + "]";
      if (con.type == "demo-tracking") {
        check_reference(con.reference, dx, cpath + ".reference");
      } else if (con.type == "abs-bound") {
        if (con.index < 0 || con.index >= dx + du)
          throw ConfigError(cpath + ".index: outside the augmented state");
        if (!std::isfinite(con.center) || !std::isfinite(con.bound))
          throw ConfigError(cpath + ": center and bound must be finite");
      } else if (con.type == "demo-x1-bound") {
        if (dx != 2) throw ConfigError(cpath + ": demo constraints need a 2-dimensional state");
      } else if (con.type != "always-satisfied" && con.type != "always-violated") {
        throw ConfigError(cpath + ".type: unknown constraint '" + con.type + "'");
      }
    }
    const InitialStateConfig& init = t.initial_state;
    if (init.policy == "fixed") {
      check_size(init.value, dx, path + ".initial_state.value");
      if (!init.value.allFinite()) throw ConfigError(path + ".initial_state.value: must be finite");
    } else if (init.policy == "uniform") {
      check_box(init.lower, init.upper, dx, path + ".initial_state");
    } else {
      throw ConfigError(path + ".initial_state.policy: expected fixed or uniform");
    }
  }
  try {
    gp.kernel.validate(dx + du);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("gp: ") + e.what());
  }
  const PriorDataConfig& prior = gp.prior_data;
  if (prior.source == "random-uniform") {
    if (prior.count < 1) throw ConfigError("gp.prior_data.count: must be at least 1");
    check_box(prior.lower, prior.upper, dx, "gp.prior_data");
  } else if (prior.source == "inline") {
    if (prior.values.rows() != static_cast<Eigen::Index>(prior.points.size()) ||
        (!prior.points.empty() && prior.values.cols() != dx))
      throw ConfigError("gp.prior_data: need one state_dim row of values per point");
    for (std::size_t i = 0; i < prior.points.size(); ++i)
      check_size(prior.points[i], dx + du, "gp.prior_data.points[" + std::to_string(i) + "]");
  } else if (prior.source != "none") {
    throw ConfigError("gp.prior_data.source: expected none, random-uniform or inline");
  }
  try {
    planner.validate(dx + du);
  } catch (const ConfigError& e) {
    const std::string message = e.what();
    if (message.rfind("region:", 0) == 0) throw ConfigError("planner." + message);
    throw;
  }
  if (repetitions < 1) throw ConfigError("planner.repetitions: must be at least 1");
  if (output.validation_runs < 1) throw ConfigError("output.validation_runs: must be at least 1");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      line += text[i] == '\n';
    if (e.byte > 0 && e.byte <= text.size() && text[e.byte - 1] == '\n') --line;
    std::string what = e.what();
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON: " + what);
  }
  const Context ctx{source, KeyLines(text)};
  const Reader root(doc, "", ctx);
  root.allow({"name", "system", "horizon", "tasks", "gp", "planner", "output"});

  RunConfig cfg;
  if (root.has("name")) cfg.name = root.child("name").string();
  cfg.system = read_system(root.child("system"));
  cfg.horizon = root.child("horizon").integer();
  const Reader tasks = root.child("tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i)
    cfg.tasks.push_back(read_task(tasks.at(i), static_cast<int>(i)));
  cfg.gp = read_gp(root.child("gp"));
  read_planner(root.child("planner"), cfg);
  if (root.has("output")) {
    const Reader out = root.child("output");
    out.allow({"directory", "validation_runs"});
    if (out.has("directory")) cfg.output.directory = out.child("directory").string();
    if (out.has("validation_runs"))
      cfg.output.validation_runs = out.child("validation_runs").integer();
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const std::string message = e.what();
    const auto colon = message.find(':');
    const std::string path = message.substr(0, colon);
    const std::string pointer = path == "horizon" ? "/horizon" : pointer_of(path);
    throw ConfigError(source + ":" + std::to_string(ctx.lines.line(pointer)) + ": " + message);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  json tasks = json::array();
  for (const auto& t : cfg.tasks) tasks.push_back(write_task(t));
  const PlannerConfig& p = cfg.planner;
  json doc{
      {"name", cfg.name},
      {"system", write_system(cfg.system)},
      {"horizon", cfg.horizon},
      {"tasks", tasks},
      {"gp",
       {{"signal_variance", cfg.gp.kernel.signal_variance},
        {"lengthscales", cfg.gp.kernel.lengthscales},
        {"noise_variance", cfg.gp.kernel.noise_variance},
        {"input_projection", cfg.gp.kernel.input_projection},
        {"prior_data", write_prior(cfg.gp.prior_data)}}},
      {"planner",
       {{"delta", p.delta},
        {"samples", p.samples},
        {"max_N", p.max_N},
        {"restarts", p.restarts},
        {"warm_start", p.warm_start},
        {"warm_start_candidates", p.warm_start_candidates},
        {"optimizer",
         {{"step_size", p.optimizer.step_size},
          {"max_iterations", p.optimizer.max_iterations},
          {"tolerance", p.optimizer.tolerance},
          {"patience", p.optimizer.patience}}},
        {"region", {{"lower", to_json(p.region.lower)}, {"upper", to_json(p.region.upper)}}},
        {"seed", p.seed},
        {"repetitions", cfg.repetitions}}},
      {"output",
       {{"directory", cfg.output.directory}, {"validation_runs", cfg.output.validation_runs}}}};
  return doc.dump(2) + "\n";
}

RunConfig paper_demo_config() {
  RunConfig cfg;
  cfg.name = "paper-demo";
  cfg.system.preset = "paper-demo";
  cfg.system.dynamics_variant = "logistic";
  cfg.system.state_dim = 2;
  cfg.system.input_dim = 2;
  cfg.system.unknown = "demo";
  cfg.system.noise_scale = 0.01 * Matrix::Identity(2, 2);
  cfg.horizon = 100;
  for (int j = 1; j <= 3; ++j) {
    TaskConfig t;
    t.id = j;
    t.controller.type = "feedback-linearizing";
    t.controller.reference.type = "demo-" + std::to_string(j);
    t.controller.reference_lead = 1;
    ConstraintConfig c;
    if (j < 3) {
      c.type = "demo-tracking";
      c.reference.type = "demo-" + std::to_string(j);
    } else {
      c.type = "demo-x1-bound";
    }
    t.constraints = {c};
    t.initial_state.policy = "uniform";
    t.initial_state.lower = Vector::Constant(2, -3.0);
    t.initial_state.upper = Vector::Constant(2, 3.0);
    cfg.tasks.push_back(t);
  }
  cfg.gp.kernel = KernelParams{2.0, {0.45, 0.85}, 1e-4, {0, 1}};
  cfg.gp.prior_data.source = "random-uniform";
  cfg.gp.prior_data.count = 100;
  cfg.gp.prior_data.lower = Vector::Constant(2, -3.0);
  cfg.gp.prior_data.upper = Vector::Constant(2, 3.0);
  PlannerConfig& p = cfg.planner;
  p.delta = 0.01;
  p.samples = 100;
  p.max_N = 20;
  p.restarts = 1;
  p.warm_start = true;
  p.warm_start_candidates = 16;
  p.optimizer.step_size = 0.5;
  p.optimizer.max_iterations = 10;
  p.optimizer.tolerance = 1e-6;
  p.optimizer.patience = 5;
  p.region.lower = Vector::Constant(4, -3.0);
  p.region.upper = Vector::Constant(4, 3.0);
  p.seed = 1;
  cfg.repetitions = 10;
  cfg.output.directory = "out";
  cfg.output.validation_runs = 100;
  return cfg;
}

RunConfig desk_scale(RunConfig config) {
  config.horizon = 40;
  config.planner.samples = 50;
  config.repetitions = 3;
  return config;
}

std::uint64_t repetition_seed(std::uint64_t seed, int repetition) {
  return derive_seed(seed, static_cast<std::uint64_t>(repetition));
}

SystemSpec build_system(const SystemConfig& config) {
  if (config.preset == "paper-demo") {
    const auto variant =
        config.dynamics_variant == "literal" ? demo::Variant::Literal : demo::Variant::Logistic;
    return demo::make_system(config.noise_scale, variant);
  }
  SystemSpec s;
  s.state_dim = config.state_dim;
  s.input_dim = config.input_dim;
  const int dx = config.state_dim;
  s.known_dynamics = [a = config.a, b = config.b, dx](const Vector& aug) -> Vector {
    return a * aug.head(dx) + b * aug.tail(aug.size() - dx);
  };
  if (config.unknown == "linear") {
    s.true_unknown = [g = config.unknown_matrix](const Vector& aug) -> Vector { return g * aug; };
  } else {
    s.true_unknown = [dx](const Vector&) -> Vector { return Vector::Zero(dx); };
  }
  s.noise_scale = config.noise_scale;
  for (int i = 0; i < dx; ++i) s.gp_input_projection.push_back(i);
  return s;
}

RepetitionData draw_repetition(const RunConfig& config, int index) {
  RepetitionData data;
  data.index = index;
  data.seed = repetition_seed(config.planner.seed, index);
  const SystemSpec system = build_system(config.system);
  const int dx = system.state_dim;
  const int du = system.input_dim;

  const PriorDataConfig& prior = config.gp.prior_data;
  if (prior.source == "inline") {
    data.prior_points = prior.points;
    data.prior_values = prior.values;
  } else if (prior.source == "random-uniform") {
    Rng rng(derive_seed(data.seed, 1));
    const bool literal = config.system.preset == "paper-demo" &&
                         config.system.dynamics_variant == "literal";
    data.prior_values.resize(prior.count, dx);
    while (static_cast<int>(data.prior_points.size()) < prior.count) {
      Vector x(dx);
      for (int i = 0; i < dx; ++i) x[i] = rng.uniform(prior.lower[i], prior.upper[i]);
      if (literal && demo::singularity_margin(x) < demo::kSupportedMargin) continue;
      const Vector aug = augment(x, Vector::Zero(du));
      Vector xi(dx);
      for (int i = 0; i < dx; ++i) xi[i] = rng.normal();
      data.prior_values.row(static_cast<Eigen::Index>(data.prior_points.size())) =
          (system.true_unknown(aug) + system.noise_scale * xi).transpose();
      data.prior_points.push_back(aug);
    }
  } else {
    data.prior_values.resize(0, dx);
  }

  Rng init(derive_seed(data.seed, 2));
  for (const auto& task : config.tasks) {
    const InitialStateConfig& policy = task.initial_state;
    if (policy.policy == "fixed") {
      data.initial_states.push_back(policy.value);
    } else {
      Vector x(dx);
      for (int i = 0; i < dx; ++i) x[i] = init.uniform(policy.lower[i], policy.upper[i]);
      data.initial_states.push_back(x);
    }
  }
  return data;
}

Problem build_problem(const RunConfig& config, const RepetitionData& data) {
  SystemSpec system = build_system(config.system);
  system.gp_input_projection = config.gp.kernel.input_projection;
  std::vector<TaskSpec> tasks;
  for (std::size_t i = 0; i < config.tasks.size(); ++i) {
    const TaskConfig& t = config.tasks[i];
    TaskSpec spec;
    spec.id = t.id;
    spec.control_law = make_controller(t.controller, system.state_dim, system.input_dim);
    spec.constraints = make_constraints(t.constraints, system.state_dim);
    spec.num_constraints = static_cast<int>(t.constraints.size());
    spec.horizon = config.horizon;
    spec.initial_state = data.initial_states.at(i);
    tasks.push_back(std::move(spec));
  }
  MultiGP prior = data.prior_points.empty()
                      ? MultiGP(config.gp.kernel, system.state_dim)
                      : MultiGP::from_data(config.gp.kernel, data.prior_points, data.prior_values);
  Problem problem{std::move(system), std::move(tasks), std::move(prior)};
  problem.validate();
  return problem;
}

PlannerConfig repetition_planner(const RunConfig& config, const RepetitionData& data) {
  PlannerConfig p = config.planner;
  p.seed = derive_seed(data.seed, 3);
  return p;
}

}  // namespace dsml
