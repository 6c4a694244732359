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

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "pastq/io.hpp"

namespace pastq {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kIoError;
}

MeasurementRecord diffusive_record() {
  const Model m = build_rabi_spin(Complex{0.0, 2.0}, 1.0, 1.0);
  return sample_diffusive_record(m, rabi_initial_state(), 0.5, 1e-3, 11).record;
}

MeasurementRecord counting_record() {
  ScenarioConfig cfg;
  cfg.grid = Grid{0.5, 1e-3};
  const Model m = build_jumping_atom(cfg);
  return sample_jump_record(m, jumping_atom_initial_state(), 0.5, 1e-3, 5).record;
}

MeasurementRecord round_trip(const MeasurementRecord& rec) {
  std::stringstream ss;
  io::write_record_csv(ss, rec);
  return io::read_record(ss, io::record_metadata(rec, nlohmann::json::object()));
}

TEST(FormatDouble, RoundTripsExactly) {
  for (double x : {0.0, -0.0, 1e-3, 0.1 + 0.2, 1.0 / 3.0, -2.718281828459045e-300, 1.7976931348623157e308}) {
    EXPECT_EQ(io::parse_double(io::format_double(x)), x);
  }
  EXPECT_EQ(kind_of([] { io::parse_double("1.0x"); }), ErrorKind::kSchemaError);
}

TEST(RecordCsv, DiffusiveRoundTripIsBitExact) {
  const auto rec = diffusive_record();
  const auto back = round_trip(rec);
  EXPECT_EQ(back.kind, rec.kind);
  EXPECT_EQ(back.dt, rec.dt);
  EXPECT_EQ(back.n_steps, rec.n_steps);
  EXPECT_EQ(back.seed, rec.seed);
  EXPECT_EQ(back.model_fingerprint, rec.model_fingerprint);
  EXPECT_EQ(back.diffusive_increments, rec.diffusive_increments);
}

TEST(RecordCsv, CountingRoundTrip) {
  const auto rec = counting_record();
  const auto back = round_trip(rec);
  EXPECT_EQ(back.kind, RecordKind::kCounting);
  EXPECT_EQ(back.counting_increments, rec.counting_increments);
}

TEST(RecordCsv, HeaderAndRowsAreChecked) {
  const auto rec = diffusive_record();
  const auto meta = io::record_metadata(rec, nlohmann::json::object());
  std::stringstream bad_header("step,t,dN_1\n0,0,1\n");
  EXPECT_EQ(kind_of([&] { io::read_record(bad_header, meta); }), ErrorKind::kSchemaError);
  std::stringstream short_csv("step,t,dY\n0,0,0.1\n");
  EXPECT_EQ(kind_of([&] { io::read_record(short_csv, meta); }), ErrorKind::kSchemaError);
  std::stringstream empty;
  EXPECT_EQ(kind_of([&] { io::read_record(empty, meta); }), ErrorKind::kSchemaError);
  auto no_kind = meta;
  no_kind.erase("kind");
  std::stringstream csv;
  io::write_record_csv(csv, rec);
  EXPECT_EQ(kind_of([&] { io::read_record(csv, no_kind); }), ErrorKind::kSchemaError);
}

TEST(RecordCsv, CountingValuesMustBeBinary) {
  auto rec = counting_record();
  auto meta = io::record_metadata(rec, nlohmann::json::object());
  meta["n_steps"] = 1;
  std::stringstream csv("step,t,dN_1,dN_2\n0,0,2,0\n");
  EXPECT_EQ(kind_of([&] { io::read_record(csv, meta); }), ErrorKind::kSchemaError);
}

TEST(RecordFiles, SaveAndLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "pastq_io_test";
  std::filesystem::create_directories(dir);
  const auto rec = diffusive_record();
  io::save_record(dir / "record.csv", dir / "record.json", rec, io::scenario_to_json(ScenarioConfig{}));
  const auto back = io::load_record(dir / "record.csv", dir / "record.json");
  EXPECT_EQ(back.diffusive_increments, rec.diffusive_increments);
  EXPECT_EQ(io::read_json_file(dir / "record.json").at("scenario").at("k"), 1.0);
  EXPECT_EQ(kind_of([&] { io::load_record(dir / "missing.csv", dir / "record.json"); }), ErrorKind::kIoError);
  std::filesystem::remove_all(dir);
}

TEST(HmmJson, RoundTripAndValidation) {
  HmmModel m;
  m.transition.resize(2, 2);
  m.transition << 0.9, 0.1, 0.25, 0.75;
  m.emission.resize(2, 3);
  m.emission << 0.5, 0.25, 0.25, 0.125, 0.125, 0.75;
  m.initial = Eigen::Vector2d(0.5, 0.5);
  const HmmModel back = io::hmm_from_json(io::hmm_to_json(m));
  EXPECT_EQ(back.transition, m.transition);
  EXPECT_EQ(back.emission, m.emission);
  EXPECT_EQ(back.initial, m.initial);

  auto j = io::hmm_to_json(m);
  j["transition"][0][0] = 0.5;
  EXPECT_EQ(kind_of([&] { io::hmm_from_json(j); }), ErrorKind::kSchemaError);
  j = io::hmm_to_json(m);
  j["emission"][1] = {0.5, 0.5};
  EXPECT_EQ(kind_of([&] { io::hmm_from_json(j); }), ErrorKind::kSchemaError);
  j = io::hmm_to_json(m);
  j.erase("initial");
  EXPECT_EQ(kind_of([&] { io::hmm_from_json(j); }), ErrorKind::kSchemaError);
  EXPECT_EQ(kind_of([] { io::observations_from_json(nlohmann::json{{"observations", "abc"}}); }),
            ErrorKind::kSchemaError);
}

TEST(ScenarioJson, RoundTripAndUnknownKeys) {
  ScenarioConfig cfg;
  cfg.chi = Complex{0.25, -1.5};
  cfg.k = 3.0;
  cfg.grid = Grid{2.5, 5e-4};
  cfg.seed = 123456789012345ULL;
  const ScenarioConfig back = io::scenario_from_json(io::scenario_to_json(cfg));
  EXPECT_EQ(back.chi, cfg.chi);
  EXPECT_EQ(back.k, cfg.k);
  EXPECT_EQ(back.grid.dt, cfg.grid.dt);
  EXPECT_EQ(back.seed, cfg.seed);
  const ScenarioConfig partial = io::scenario_from_json(nlohmann::json{{"chi", 1.0}}, cfg);
  EXPECT_EQ(partial.chi, Complex(1.0, 0.0));
  EXPECT_EQ(partial.k, 3.0);
  EXPECT_EQ(kind_of([] { io::scenario_from_json(nlohmann::json{{"kappa", 1.0}}); }), ErrorKind::kSchemaError);
  EXPECT_EQ(kind_of([] { io::scenario_from_json(nlohmann::json{{"k", "one"}}); }), ErrorKind::kSchemaError);
}

TEST(TrajectoryCsv, HeaderAndRowCount) {
  const Model m = build_rabi_spin(Complex{0.0, 2.0}, 1.0, 1.0);
  const auto s = sample_diffusive_record(m, rabi_initial_state(), 0.01, 1e-3, 1);
  std::stringstream ss;
  io::write_trajectory_csv(ss, s.trajectory);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line.rfind("t,log_norm,m0_0_re,m0_0_im", 0), 0u);
  std::size_t rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, s.trajectory.size());
}

}  // namespace
}  // namespace pastq
