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

#include "dsml/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dsml/errors.hpp"
#include "json.hpp"

namespace dsml {

using nlohmann::json;

namespace {

json vec(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json rows(const std::vector<Vector>& list) {
  json out = json::array();
  for (const auto& v : list) out.push_back(vec(v));
  return out;
}

json rows(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec(m.row(r).transpose()));
  return out;
}

Vector read_vec(const json& j) {
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return out;
}

std::vector<Vector> read_rows(const json& j) {
  std::vector<Vector> out;
  for (const auto& r : j) out.push_back(read_vec(r));
  return out;
}

Matrix read_matrix(const json& j, Eigen::Index cols) {
  Matrix out(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = read_vec(j.at(r));
    if (row.size() != cols) throw ConfigError("ragged matrix");
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

const char* termination_name(Termination t) {
  return t == Termination::Satisfied ? "satisfied" : "cap";
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string plan_to_json(const PlanFile& plan) {
  json reps = json::array();
  for (const auto& rep : plan.repetitions) {
    const PlanResult& r = rep.result;
    json history = json::array();
    for (const auto& h : r.satisfaction_history)
      history.push_back({{"N", h.N}, {"satisfaction", h.satisfaction}});
    json traces = json::array();
    for (const auto& per_n : r.traces) {
      json list = json::array();
      for (const auto& t : per_n)
        list.push_back({{"N", t.N},
                        {"start", t.start},
                        {"iterations", t.iterations},
                        {"satisfaction", t.satisfaction},
                        {"failures", t.failures},
                        {"surrogate", t.surrogate}});
      traces.push_back(list);
    }
    reps.push_back({{"index", rep.data.index},
                    {"seed", rep.data.seed},
                    {"N_final", r.N_final},
                    {"terminated_by", termination_name(r.terminated_by)},
                    {"locations", rows(r.locations)},
                    {"satisfaction_history", history},
                    {"traces", traces},
                    {"initial_states", rows(rep.data.initial_states)},
                    {"prior_points", rows(rep.data.prior_points)},
                    {"prior_values", rows(rep.data.prior_values)}});
  }
  const json doc{{"config", json::parse(serialize_config(plan.config))}, {"repetitions", reps}};
  return doc.dump(2) + "\n";
}

PlanFile plan_from_json(const std::string& text, const std::string& source) {
  PlanFile out;
  try {
    const json doc = json::parse(text);
    out.config = parse_config(doc.at("config").dump(2), source + "#config");
    const auto dx = static_cast<Eigen::Index>(out.config.system.state_dim);
    for (const auto& r : doc.at("repetitions")) {
      RepetitionPlan rep;
      rep.data.index = r.at("index").get<int>();
      rep.data.seed = r.at("seed").get<std::uint64_t>();
      rep.data.initial_states = read_rows(r.at("initial_states"));
      rep.data.prior_points = read_rows(r.at("prior_points"));
      rep.data.prior_values = read_matrix(r.at("prior_values"), dx);
      PlanResult& res = rep.result;
      res.N_final = r.at("N_final").get<int>();
      const std::string term = r.at("terminated_by").get<std::string>();
      if (term != "satisfied" && term != "cap") throw ConfigError("bad terminated_by '" + term + "'");
      res.terminated_by = term == "satisfied" ? Termination::Satisfied : Termination::Cap;
      res.locations = read_rows(r.at("locations"));
      for (const auto& h : r.at("satisfaction_history"))
        res.satisfaction_history.push_back({h.at("N").get<int>(), h.at("satisfaction").get<double>()});
      for (const auto& per_n : r.at("traces")) {
        std::vector<OptimizerTrace> list;
        for (const auto& t : per_n) {
          OptimizerTrace tr;
          tr.N = t.at("N").get<int>();
          tr.start = t.at("start").get<int>();
          tr.iterations = t.at("iterations").get<int>();
          tr.satisfaction = t.at("satisfaction").get<double>();
          tr.failures = t.at("failures").get<int>();
          tr.surrogate = t.at("surrogate").get<std::vector<double>>();
          list.push_back(std::move(tr));
        }
        res.traces.push_back(std::move(list));
      }
      if (static_cast<int>(res.satisfaction_history.size()) != res.N_final + 1 ||
          static_cast<int>(res.locations.size()) != res.N_final)
        throw ConfigError("repetition " + std::to_string(rep.data.index) +
                          ": history and locations do not match N_final");
      if (rep.data.initial_states.size() != out.config.tasks.size())
        throw ConfigError("repetition " + std::to_string(rep.data.index) +
                          ": one initial state per task expected");
      out.repetitions.push_back(std::move(rep));
    }
  } catch (const json::exception& e) {
    throw ConfigError(source + ": malformed plan file: " + e.what());
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(source, 0) == 0) throw;
    throw ConfigError(source + ": " + what);
  }
  return out;
}

std::string satisfaction_csv(const PlanFile& plan) {
  std::ostringstream out;
  const std::size_t R = plan.repetitions.size();
  out << "N";
  for (std::size_t r = 0; r < R; ++r) out << ",rep_" << plan.repetitions[r].data.index;
  out << ",mean,std\n";
  std::size_t rows_needed = 0;
  for (const auto& rep : plan.repetitions)
    rows_needed = std::max(rows_needed, rep.result.satisfaction_history.size());
  for (std::size_t n = 0; n < rows_needed; ++n) {
    out << n;
    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    for (const auto& rep : plan.repetitions) {
      out << ',';
      const auto& h = rep.result.satisfaction_history;
      if (n < h.size()) {
        const double c = h[n].satisfaction;
        out << format_double(c);
        sum += c;
        sum_sq += c * c;
        ++count;
      }
    }
    const double mean = sum / count;
    const double var = count > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1)) : 0.0;
    out << ',' << format_double(mean) << ',' << format_double(std::sqrt(var)) << '\n';
  }
  return out.str();
}

std::string locations_csv(const PlanFile& plan) {
  std::ostringstream out;
  const int dim = plan.config.system.state_dim + plan.config.system.input_dim;
  out << "repetition,index";
  for (int i = 0; i < dim; ++i) out << ",coord_" << i;
  out << '\n';
  for (const auto& rep : plan.repetitions) {
    const auto& locs = rep.result.locations;
    for (std::size_t k = 0; k < locs.size(); ++k) {
      out << rep.data.index << ',' << k;
      for (Eigen::Index i = 0; i < locs[k].size(); ++i) out << ',' << format_double(locs[k][i]);
      out << '\n';
    }
  }
  return out.str();
}

std::string violations_csv(const ValidationReport& report) {
  std::ostringstream out;
  out << "task,t,mean_violation,std_violation,max_violation,violating_runs\n";
  for (const auto& tv : report.tasks)
    for (std::size_t k = 0; k < tv.mean_violation.size(); ++k)
      out << tv.task << ',' << k + 1 << ',' << format_double(tv.mean_violation[k]) << ','
          << format_double(tv.std_violation[k]) << ',' << format_double(tv.max_violation[k])
          << ',' << tv.violation_counts[k] << '\n';
  return out.str();
}

std::string report_json(const ValidationReport& pooled, const PlanFile& plan,
                        const std::vector<ValidationReport>& per_repetition) {
  auto task_json = [](const TaskValidation& tv) {
    return json{{"task", tv.task},
                {"violating_runs", tv.violating_runs},
                {"violation_rate", tv.violation_rate},
                {"violation_counts", tv.violation_counts},
                {"mean_violation", tv.mean_violation},
                {"max_violation", tv.max_violation}};
  };
  json tasks = json::array();
  for (const auto& tv : pooled.tasks) tasks.push_back(task_json(tv));
  json reps = json::array();
  for (std::size_t r = 0; r < per_repetition.size(); ++r) {
    const ValidationReport& v = per_repetition[r];
    const PlanResult& res = plan.repetitions.at(r).result;
    json rates = json::array();
    for (const auto& tv : v.tasks) rates.push_back({{"task", tv.task}, {"violation_rate", tv.violation_rate}});
    reps.push_back({{"index", plan.repetitions[r].data.index},
                    {"N_final", res.N_final},
                    {"terminated_by", termination_name(res.terminated_by)},
                    {"final_satisfaction", res.satisfaction_history.back().satisfaction},
                    {"runs", v.runs},
                    {"violating_runs", v.violating_runs},
                    {"violation_rate", v.violation_rate},
                    {"failed_runs", v.failed_runs},
                    {"tasks", rates}});
  }
  const json doc{{"runs", pooled.runs},
                 {"horizon", pooled.horizon},
                 {"violating_runs", pooled.violating_runs},
                 {"violation_rate", pooled.violation_rate},
                 {"satisfaction_rate", pooled.satisfaction_rate},
                 {"failed_runs", pooled.failed_runs},
                 {"tasks", tasks},
                 {"repetitions", reps}};
  return doc.dump(2) + "\n";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos
                                                                      : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    out.push_back(std::move(fields));
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string() + ": cannot write");
  out << text;
  if (!out) throw ConfigError(path.string() + ": write failed");
}

}  // namespace dsml
