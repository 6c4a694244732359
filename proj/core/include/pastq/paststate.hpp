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

// Past quantum state assembly and the quantities derived from it.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pastq/effect.hpp"
#include "pastq/filter.hpp"
#include "pastq/model.hpp"
#include "pastq/qops.hpp"

namespace pastq {

struct PastTrajectory {
  /// pairs[i] = (rho(t_i), E(t_i)); at interruption indices both members are
  /// the post-map forward state and the pre-map backward effect.
  std::vector<PastStatePair> pairs;
  /// (rho before the forward map, E after the backward map) at interruptions.
  std::map<std::size_t, PastStatePair> before_interruption;

  std::size_t size() const { return pairs.size(); }
};

/// Index-aligned combination of a forward and a backward pass over one grid.
PastTrajectory zip(const StateTrajectory& forward, const EffectTrajectory& backward);

PastTrajectory smooth(const MeasurementRecord& record, const Model& model, const DensityMatrix& rho0,
                      std::span<const Interruption> interruptions = {});

struct ExpectationPoint {
  double t = 0.0;
  double forward_mean = 0.0;
  /// Empty where Tr(rho E) vanishes.
  std::optional<Complex> weak_value;
};

std::vector<ExpectationPoint> expectation_series(const PastTrajectory& traj, const Operator& a);

/// Coefficients of the one-step differentials of <A> and <A>_w on step i.
/// Traces run over rho(t_i) and E(t_{i+1}); the weak-value terms are divided by
/// Tr(rho(t_i) E(t_i)), which makes
///   <A>_w(t_{i+1}) - <A>_w(t_i) = weak_dt dt + weak_dy dY_i
/// hold exactly for the first-order steppers.
struct IncrementCoefficients {
  double t = 0.0;
  double forward_dt = 0.0;  ///< dt coefficient of d<A>
  double forward_dw = 0.0;  ///< dW coefficient of d<A>
  Complex weak_dt{};        ///< dt coefficient of d<A>_w
  Complex weak_dy{};        ///< dY coefficient of d<A>_w, sqrt(eta) Tr([A,c] rho E) / Tr(rho E)
  bool degenerate = false;
};

std::vector<IncrementCoefficients> increment_diagnostics(const PastTrajectory& traj, const MeasurementRecord& record,
                                                         const Model& model, const Operator& a);

}  // namespace pastq
