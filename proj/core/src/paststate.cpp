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

#include "pastq/paststate.hpp"

#include <cmath>

namespace pastq {

PastTrajectory zip(const StateTrajectory& forward, const EffectTrajectory& backward) {
  if (forward.size() != backward.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "forward and backward passes have different lengths");
  }
  PastTrajectory out;
  out.pairs.reserve(forward.size());
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (forward.times[i] != backward.times[i]) {
      throw Error(ErrorKind::kDimensionMismatch, "forward and backward grids differ at index " + std::to_string(i));
    }
    if (forward.states[i].dim() != backward.effects[i].dim()) {
      throw Error(ErrorKind::kDimensionMismatch, "state and effect dimensions differ");
    }
    out.pairs.push_back({forward.states[i], backward.effects[i], forward.times[i]});
  }
  if (forward.before_interruption.size() != backward.before_interruption.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "forward and backward interruption sets differ");
  }
  for (const auto& [i, rho] : forward.before_interruption) {
    auto it = backward.before_interruption.find(i);
    if (it == backward.before_interruption.end()) {
      throw Error(ErrorKind::kDimensionMismatch, "forward and backward interruption sets differ");
    }
    out.before_interruption.emplace(i, PastStatePair{rho, it->second, forward.times[i]});
  }
  return out;
}

PastTrajectory smooth(const MeasurementRecord& record, const Model& model, const DensityMatrix& rho0,
                      std::span<const Interruption> interruptions) {
  return zip(run_forward(record, model, rho0, interruptions), run_backward(record, model, interruptions));
}

std::vector<ExpectationPoint> expectation_series(const PastTrajectory& traj, const Operator& a) {
  std::vector<ExpectationPoint> out;
  out.reserve(traj.size());
  for (const auto& pair : traj.pairs) {
    if (pair.rho.dim() != a.rows() || a.rows() != a.cols()) {
      throw Error(ErrorKind::kDimensionMismatch, "observable does not match the state dimension");
    }
    ExpectationPoint p;
    p.t = pair.time;
    p.forward_mean = trace_product(a, pair.rho.op).real();
    try {
      p.weak_value = weak_value(pair, a);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegeneratePastState) throw;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<IncrementCoefficients> increment_diagnostics(const PastTrajectory& traj, const MeasurementRecord& record,
                                                         const Model& model, const Operator& a) {
  if (record.kind != RecordKind::kDiffusive) {
    throw Error(ErrorKind::kInvalidParameter, "increment diagnostics need a diffusive record");
  }
  if (traj.size() != record.n_steps + 1) {
    throw Error(ErrorKind::kDimensionMismatch, "trajectory and record lengths differ");
  }
  model.validate();
  if (a.rows() != model.dim || a.cols() != model.dim) {
    throw Error(ErrorKind::kDimensionMismatch, "observable does not match the model dimension");
  }
  const Complex i_unit{0.0, 1.0};
  const Operator comm_ah = commutator(a, model.hamiltonian);
  const Channel* diff = model.diffusive_channel();

  struct Terms {
    Operator l, l_dag, comm_al, comm_alal;
  };
  std::vector<Terms> terms;
  for (const auto& ch : model.channels) {
    const Operator& l = ch.lindblad;
    terms.push_back({l, l.adjoint(), commutator(a, l), commutator(a, l.adjoint() * l)});
  }
  Operator c = Operator::Zero(model.dim, model.dim);
  double sqrt_eta = 0.0;
  if (diff != nullptr) {
    c = diff->lindblad;
    sqrt_eta = std::sqrt(diff->eta);
  }
  const Operator comm_ac = commutator(a, c);
  const Operator ac_cda = a * c + c.adjoint() * a;
  const Operator c_cd = c + c.adjoint();

  std::vector<IncrementCoefficients> out(record.n_steps);
  for (std::size_t i = 0; i < record.n_steps; ++i) {
    const Operator& rho = traj.pairs[i].rho.op;
    auto before = traj.before_interruption.find(i + 1);
    const Operator& e = before != traj.before_interruption.end() ? before->second.effect.op : traj.pairs[i + 1].effect.op;
    IncrementCoefficients& r = out[i];
    r.t = traj.pairs[i].time;

    const double mean_a = trace_product(a, rho).real();
    double fdt = (-i_unit * trace_product(comm_ah, rho)).real();
    for (const auto& t : terms) {
      fdt += trace_product(a, t.l * rho * t.l_dag).real() - 0.5 * trace_product(anticommutator(a, t.l_dag * t.l), rho).real();
    }
    r.forward_dt = fdt;
    r.forward_dw = sqrt_eta * (trace_product(ac_cda, rho).real() - trace_product(c_cd, rho).real() * mean_a);

    const Operator rho_e = rho * e;
    // Tr(rho_t E_t) expressed in the scale of E_{t+dt}.
    const EffectMatrix& e_now = traj.pairs[i].effect;
    const double e_next_log = before != traj.before_interruption.end() ? before->second.effect.log_norm
                                                                        : traj.pairs[i + 1].effect.log_norm;
    const Complex norm = trace_product(rho, e_now.op) * std::exp(e_now.log_norm - e_next_log);
    if (std::abs(norm) <= kDegenerateThreshold) {
      r.degenerate = true;
      continue;
    }
    Complex wdt = -i_unit * trace_product(comm_ah, rho_e);
    for (const auto& t : terms) {
      wdt += trace_product(t.comm_al * rho * t.l_dag, e) - 0.5 * trace_product(t.comm_alal, rho_e);
    }
    r.weak_dt = wdt / norm;
    r.weak_dy = sqrt_eta * trace_product(comm_ac, rho_e) / norm;
  }
  return out;
}

}  // namespace pastq
