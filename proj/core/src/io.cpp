// Copyright 2026 The pastq Authors
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

#include "pastq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pastq::io {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kSchemaError, "cannot parse integer '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::kSchemaError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchemaError, std::string("field '") + key + "': " + e.what());
  }
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* key) {
  const auto rows = get_field<std::vector<std::vector<double>>>(j, key);
  if (rows.empty()) throw Error(ErrorKind::kSchemaError, std::string("'") + key + "' is empty");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) {
      throw Error(ErrorKind::kSchemaError, std::string("'") + key + "' is not rectangular");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

template <typename Seq>
void write_matrix_series(std::ostream& os, const std::vector<double>& times, const Seq& seq) {
  const Index dim = seq.empty() ? 0 : seq.front().op.rows();
  os << "t,log_norm";
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c) os << ",m" << r << '_' << c << "_re,m" << r << '_' << c << "_im";
  }
  os << '\n';
  for (std::size_t i = 0; i < seq.size(); ++i) {
    os << format_double(times[i]) << ',' << format_double(seq[i].log_norm);
    for (Index r = 0; r < dim; ++r) {
      for (Index c = 0; c < dim; ++c) {
        os << ',' << format_double(seq[i].op(r, c).real()) << ',' << format_double(seq[i].op(r, c).imag());
      }
    }
    os << '\n';
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kSchemaError, "cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

void write_record_csv(std::ostream& os, const MeasurementRecord& record) {
  record.validate();
  os << "step,t";
  if (record.kind == RecordKind::kDiffusive) {
    os << ",dY";
  } else {
    for (std::size_t j = 0; j < record.counting_increments.size(); ++j) os << ",dN_" << j + 1;
  }
  os << '\n';
  for (std::size_t i = 0; i < record.n_steps; ++i) {
    os << i << ',' << format_double(static_cast<double>(i) * record.dt);
    if (record.kind == RecordKind::kDiffusive) {
      os << ',' << format_double(record.diffusive_increments[i]);
    } else {
      for (const auto& series : record.counting_increments) os << ',' << series[i];
    }
    os << '\n';
  }
}

nlohmann::json record_metadata(const MeasurementRecord& record, const nlohmann::json& scenario) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(record.kind));
  j["dt"] = record.dt;
  j["n_steps"] = record.n_steps;
  j["seed"] = record.seed;
  j["model_fingerprint"] = record.model_fingerprint;
  j["n_channels"] = record.kind == RecordKind::kDiffusive ? 1 : record.counting_increments.size();
  j["scenario"] = scenario;
  return j;
}

MeasurementRecord read_record(std::istream& csv, const nlohmann::json& metadata) {
  MeasurementRecord rec;
  const auto kind = get_field<std::string>(metadata, "kind");
  if (kind == "diffusive") {
    rec.kind = RecordKind::kDiffusive;
  } else if (kind == "counting") {
    rec.kind = RecordKind::kCounting;
  } else {
    throw Error(ErrorKind::kSchemaError, "unknown record kind '" + kind + "'");
  }
  rec.dt = get_field<double>(metadata, "dt");
  rec.n_steps = get_field<std::size_t>(metadata, "n_steps");
  rec.seed = get_field<std::uint64_t>(metadata, "seed");
  rec.model_fingerprint = get_field<std::string>(metadata, "model_fingerprint");
  const auto n_channels = get_field<std::size_t>(metadata, "n_channels");

  std::string line;
  if (!std::getline(csv, line)) throw Error(ErrorKind::kSchemaError, "record CSV is empty");
  std::string expected = "step,t";
  if (rec.kind == RecordKind::kDiffusive) {
    expected += ",dY";
  } else {
    for (std::size_t j = 0; j < n_channels; ++j) expected += ",dN_" + std::to_string(j + 1);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw Error(ErrorKind::kSchemaError, "record header '" + line + "', expected '" + expected + "'");

  if (rec.kind == RecordKind::kDiffusive) {
    rec.diffusive_increments.reserve(rec.n_steps);
  } else {
    rec.counting_increments.assign(n_channels, {});
  }
  std::size_t step = 0;
  while (std::getline(csv, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2 + (rec.kind == RecordKind::kDiffusive ? 1 : n_channels)) {
      throw Error(ErrorKind::kSchemaError, "record row " + std::to_string(step) + " has " +
                                               std::to_string(cells.size()) + " columns");
    }
    if (parse_integer<std::size_t>(cells[0]) != step) {
      throw Error(ErrorKind::kSchemaError, "record rows out of order at step " + std::to_string(step));
    }
    if (rec.kind == RecordKind::kDiffusive) {
      rec.diffusive_increments.push_back(parse_double(cells[2]));
    } else {
      for (std::size_t j = 0; j < n_channels; ++j) rec.counting_increments[j].push_back(parse_integer<int>(cells[2 + j]));
    }
    ++step;
  }
  if (step != rec.n_steps) {
    throw Error(ErrorKind::kSchemaError,
                "record has " + std::to_string(step) + " rows, metadata says " + std::to_string(rec.n_steps));
  }
  try {
    rec.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kSchemaError, e.what());
  }
  return rec;
}

void save_record(const std::filesystem::path& csv_path, const std::filesystem::path& json_path,
                 const MeasurementRecord& record, const nlohmann::json& scenario) {
  std::ostringstream csv;
  write_record_csv(csv, record);
  write_text_file(csv_path, csv.str());
  write_text_file(json_path, record_metadata(record, scenario).dump(2) + "\n");
}

MeasurementRecord load_record(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  const nlohmann::json meta = read_json_file(json_path);
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + csv_path.string());
  return read_record(in, meta);
}

void write_trajectory_csv(std::ostream& os, const StateTrajectory& traj) {
  write_matrix_series(os, traj.times, traj.states);
}

void write_trajectory_csv(std::ostream& os, const EffectTrajectory& traj) {
  write_matrix_series(os, traj.times, traj.effects);
}

nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
  return nlohmann::json{
      {"chi", {cfg.chi.real(), cfg.chi.imag()}},
      {"k", cfg.k},
      {"eta", cfg.eta},
      {"gamma_a", cfg.gamma_a},
      {"gamma_b", cfg.gamma_b},
      {"r_ab", cfg.r_ab},
      {"r_ba", cfg.r_ba},
      {"omega_a", cfg.omega_a},
      {"omega_b", cfg.omega_b},
      {"grid", {{"t_end", cfg.grid.t_end}, {"dt", cfg.grid.dt}}},
      {"seed", cfg.seed},
  };
}

ScenarioConfig scenario_from_json(const nlohmann::json& j, const ScenarioConfig& base) {
  if (!j.is_object()) throw Error(ErrorKind::kSchemaError, "scenario parameters must be a JSON object");
  static const std::vector<std::string> known{"chi",     "k",       "eta",     "gamma_a", "gamma_b", "r_ab",
                                              "r_ba",    "omega_a", "omega_b", "grid",    "seed"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorKind::kSchemaError, "unknown scenario parameter '" + item.key() + "'");
    }
  }
  ScenarioConfig cfg = base;
  if (j.contains("chi")) {
    const auto& chi = j.at("chi");
    if (chi.is_number()) {
      cfg.chi = Complex{chi.get<double>(), 0.0};
    } else {
      const auto parts = get_field<std::vector<double>>(j, "chi");
      if (parts.size() != 2) throw Error(ErrorKind::kSchemaError, "'chi' must be a number or [re, im]");
      cfg.chi = Complex{parts[0], parts[1]};
    }
  }
  auto real = [&j](const char* key, double& slot) {
    if (j.contains(key)) slot = get_field<double>(j, key);
  };
  real("k", cfg.k);
  real("eta", cfg.eta);
  real("gamma_a", cfg.gamma_a);
  real("gamma_b", cfg.gamma_b);
  real("r_ab", cfg.r_ab);
  real("r_ba", cfg.r_ba);
  real("omega_a", cfg.omega_a);
  real("omega_b", cfg.omega_b);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object()) throw Error(ErrorKind::kSchemaError, "'grid' must be an object with t_end and dt");
    if (g.contains("t_end")) cfg.grid.t_end = get_field<double>(g, "t_end");
    if (g.contains("dt")) cfg.grid.dt = get_field<double>(g, "dt");
  }
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
  return cfg;
}

nlohmann::json hmm_to_json(const HmmModel& model) {
  auto rows = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
    }
    return out;
  };
  std::vector<double> init(model.initial.data(), model.initial.data() + model.initial.size());
  return nlohmann::json{{"transition", rows(model.transition)}, {"emission", rows(model.emission)}, {"initial", init}};
}

HmmModel hmm_from_json(const nlohmann::json& j) {
  HmmModel m;
  m.transition = matrix_from_json(j, "transition");
  m.emission = matrix_from_json(j, "emission");
  const auto init = get_field<std::vector<double>>(j, "initial");
  m.initial = Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<Index>(init.size()));
  m.validate();
  return m;
}

Observations observations_from_json(const nlohmann::json& j) {
  return get_field<std::vector<int>>(j, "observations");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kSchemaError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

}  // namespace pastq::io
