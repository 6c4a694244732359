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

#pragma once

// Hidden-measurement guessing game on the driven, monitored spin: a projective
// sigma_z measurement at t0 is performed on the true system but never read;
// the task is to guess its outcome from the homodyne record, once from rho(t0)
// and once from the past quantum state at t0.

#include <array>
#include <cstdint>

#include "pastq/filter.hpp"
#include "pastq/model.hpp"

namespace pastq {

struct GameConfig {
  ScenarioConfig scenario = default_game_scenario();
  double t0 = 2.0;
  std::size_t n_trajectories = 10000;
  std::uint64_t base_seed = 7;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  static ScenarioConfig default_game_scenario();
  static GameConfig defaults();
};

inline constexpr std::size_t kHistogramBins = 20;
using Histogram = std::array<std::size_t, kHistogramBins>;

/// Bin of a probability in [0, 1] on 20 equal bins, p = 1 in the last.
std::size_t histogram_bin(double p);

struct GameReport {
  std::size_t n = 0;           ///< trajectories requested
  std::size_t completed = 0;   ///< trajectories that finished
  std::size_t failures = 0;
  double forward_accuracy = 0.0;
  double past_accuracy = 0.0;
  Histogram forward_histogram{};  ///< P(up) from rho(t0)
  Histogram past_histogram{};     ///< P(up) from the past quantum state
  std::size_t forward_ties = 0;
  std::size_t past_ties = 0;
  /// Mean and standard error of ln P(hidden outcome); probabilities are
  /// floored at 1e-300.
  double forward_log_score = 0.0;
  double past_log_score = 0.0;
  double forward_log_score_se = 0.0;
  double past_log_score_se = 0.0;
  double log_score_difference_se = 0.0;  ///< SE of the paired difference past - forward
};

struct InterruptedSample {
  MeasurementRecord record;
  HiddenTruth truth;  ///< projective_outcome: 0 = up, 1 = down
};

/// Simulates the true system (including the unread 1 - eta share of the
/// signal), draws and applies the hidden projective outcome at t0, and
/// returns the observed record.
InterruptedSample simulate_interrupted_record(const Model& model, const DensityMatrix& rho0, double t_end,
                                              double dt, double t0, std::uint64_t seed);

struct GuessProbabilities {
  double forward_up = 0.0;  ///< Tr(P_up rho(t0-))
  double past_up = 0.0;     ///< past distribution at t0
};

/// Estimates at t0 from the record alone, using the model's pointer projectors
/// as the hidden measurement.
GuessProbabilities interrupted_estimates(const MeasurementRecord& record, const Model& model,
                                         const DensityMatrix& rho0, double t0);

GameReport guessing_game(const GameConfig& cfg);

}  // namespace pastq
