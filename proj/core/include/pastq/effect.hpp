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

// Backward propagation of the effect matrix E(t) from E(T) = I over a stored
// record, consuming the increments in reverse.

#include <map>
#include <span>
#include <vector>

#include "pastq/filter.hpp"
#include "pastq/model.hpp"
#include "pastq/qops.hpp"

namespace pastq {

struct EffectTrajectory {
  std::vector<double> times;
  /// effects[i] is E(t_i); effects.back() is the identity with log_norm 0.
  /// At an interruption index it is the effect after the interruption in time,
  /// i.e. before the backward projective map has been applied.
  std::vector<EffectMatrix> effects;
  /// Effects with the backward projective map applied, at interruption indices.
  std::map<std::size_t, EffectMatrix> before_interruption;

  std::size_t size() const { return effects.size(); }
};

/// E_{t-dt} from E_t, consuming the increment of [t - dt, t].
EffectMatrix diffusive_backstep(const EffectMatrix& effect, const Model& model, double dy_prev, double dt);

EffectMatrix jump_backstep(const EffectMatrix& effect, const Model& model, std::span<const int> dn_prev, double dt);
EffectMatrix jump_backstep(const EffectMatrix& effect, const Model& model, int dn_prev, double dt);

EffectTrajectory run_backward(const MeasurementRecord& record, const Model& model,
                              std::span<const Interruption> interruptions = {});

}  // namespace pastq
