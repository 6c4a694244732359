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

#include "pastq/effect.hpp"

#include "propagator.hpp"
#include "schedule.hpp"

namespace pastq {
namespace {

void require_dim(const Model& model, Index dim) {
  if (model.dim != dim) {
    throw Error(ErrorKind::kDimensionMismatch,
                "effect has dimension " + std::to_string(dim) + ", model has " + std::to_string(model.dim));
  }
}

EffectMatrix finish(Operator op, double log_norm) {
  const double ln = detail::renormalize(op, ErrorKind::kDegeneratePastState);
  return EffectMatrix{std::move(op), log_norm + ln};
}

}  // namespace

EffectMatrix diffusive_backstep(const EffectMatrix& effect, const Model& model, double dy_prev, double dt) {
  require_dim(model, effect.dim());
  detail::Propagator prop(model, dt);
  if (prop.n_counting() > 0) throw Error(ErrorKind::kInvalidParameter, "diffusive_backstep on a counting model");
  Operator x = effect.op;
  prop.backward_diffusive(x, dy_prev);
  return finish(std::move(x), effect.log_norm);
}

EffectMatrix jump_backstep(const EffectMatrix& effect, const Model& model, std::span<const int> dn_prev, double dt) {
  require_dim(model, effect.dim());
  detail::Propagator prop(model, dt);
  if (prop.n_counting() == 0) throw Error(ErrorKind::kInvalidParameter, "jump_backstep needs a counting channel");
  Operator x = effect.op;
  prop.backward_counting(x, dn_prev);
  return finish(std::move(x), effect.log_norm);
}

EffectMatrix jump_backstep(const EffectMatrix& effect, const Model& model, int dn_prev, double dt) {
  const int one[1] = {dn_prev};
  return jump_backstep(effect, model, std::span<const int>(one), dt);
}

EffectTrajectory run_backward(const MeasurementRecord& record, const Model& model,
                              std::span<const Interruption> interruptions) {
  check_record_matches(record, model);
  detail::Propagator prop(model, record.dt);
  const std::size_t n = record.n_steps;
  const auto schedule = detail::build_schedule(interruptions, record.dt, n, model.dim);

  EffectTrajectory traj;
  traj.times = detail::grid_times(record.dt, n);
  traj.effects.resize(n + 1);

  Operator x = identity(model.dim);
  double log_norm = 0.0;
  auto store = [&](std::size_t i) {
    traj.effects[i] = EffectMatrix{x, log_norm};
    auto it = schedule.find(i);
    if (it == schedule.end()) return;
    EffectMatrix e{x, log_norm};
    for (auto p = it->second.rbegin(); p != it->second.rend(); ++p) e = projective_map(e, **p);
    x = e.op;
    traj.before_interruption.emplace(i, std::move(e));
  };

  store(n);
  std::vector<int> dn(prop.n_counting());
  for (std::size_t i = n; i-- > 0;) {
    if (record.kind == RecordKind::kDiffusive) {
      prop.backward_diffusive(x, record.diffusive_increments[i]);
    } else {
      for (std::size_t j = 0; j < dn.size(); ++j) dn[j] = record.counting_increments[j][i];
      prop.backward_counting(x, dn);
    }
    log_norm += detail::renormalize(x, ErrorKind::kDegeneratePastState);
    store(i);
  }
  return traj;
}

}  // namespace pastq
