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

// Forward filtering: diffusive (homodyne) and jump (counting) steppers, record
// samplers with a simulation-side truth layer, and forward replay of a stored
// record with optional unread projective interruptions.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pastq/model.hpp"
#include "pastq/qops.hpp"

namespace pastq {

enum class RecordKind { kDiffusive, kCounting };

std::string_view to_string(RecordKind kind);

/// Measurement increments on the grid t_i = i * dt. Increment i belongs to the
/// interval [t_i, t_{i+1}].
struct MeasurementRecord {
  RecordKind kind = RecordKind::kDiffusive;
  double dt = 1e-3;
  std::size_t n_steps = 0;
  std::vector<double> diffusive_increments;           ///< dY per step
  std::vector<std::vector<int>> counting_increments;  ///< dN[channel][step]
  std::uint64_t seed = 0;
  std::string model_fingerprint;

  double t_end() const { return static_cast<double>(n_steps) * dt; }
  /// Checks series lengths and dN in {0, 1}.
  void validate() const;
};

/// An unread projective measurement at `time` (must lie on the grid).
struct Interruption {
  double time = 0.0;
  std::vector<Operator> projectors;
};

struct StateTrajectory {
  std::vector<double> times;
  /// states[i] is rho(t_i). At an interruption index it is the post-map state.
  std::vector<DensityMatrix> states;
  /// Pre-map states at interruption indices.
  std::map<std::size_t, DensityMatrix> before_interruption;

  std::size_t size() const { return states.size(); }
};

/// Simulation-only ground truth, consumed by evaluation harnesses only.
struct HiddenTruth {
  /// Index of the occupied pointer projector at every grid point (empty when
  /// the model has no pointer projectors).
  std::vector<int> site;
  std::optional<int> projective_outcome;
};

DensityMatrix diffusive_step(const DensityMatrix& rho, const Model& model, double dy, double dt);

/// The bare linear update of diffusive_step, without Hermitization or
/// normalization.
Operator diffusive_step_linear(const Operator& rho, const Model& model, double dy, double dt);

DensityMatrix jump_step(const DensityMatrix& rho, const Model& model, std::span<const int> dn, double dt);
/// Single counting channel shorthand.
DensityMatrix jump_step(const DensityMatrix& rho, const Model& model, int dn, double dt);

/// Homodyne measurement operator for one step with record increment dY:
/// (2 pi dt)^(-1/4) exp(-dY^2 / (4 dt)) (I - i H dt - c^dag c dt / 2 + c dY).
/// Requires a model whose only channel is a diffusive one with eta = 1.
Operator homodyne_kraus(const Model& model, double dy, double dt);

struct DiffusiveSample {
  MeasurementRecord record;
  StateTrajectory trajectory;
  std::vector<double> innovations;  ///< dW per step
};

struct JumpSample {
  MeasurementRecord record;
  StateTrajectory trajectory;
  HiddenTruth truth;
};

DiffusiveSample sample_diffusive_record(const Model& model, const DensityMatrix& rho0, double t_end, double dt,
                                        std::uint64_t seed);

/// Unravels every channel (counting and unobserved) as jumps on a truth state
/// whose initial pointer sector is drawn from rho0. The filter sees only the
/// counting channels.
JumpSample sample_jump_record(const Model& model, const DensityMatrix& rho0, double t_end, double dt,
                              std::uint64_t seed);

StateTrajectory run_forward(const MeasurementRecord& record, const Model& model, const DensityMatrix& rho0,
                            std::span<const Interruption> interruptions = {});

/// Throws FingerprintMismatch or InvalidParameter when the record cannot be
/// replayed through the model.
void check_record_matches(const MeasurementRecord& record, const Model& model);

}  // namespace pastq
