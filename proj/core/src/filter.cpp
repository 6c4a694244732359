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

#include "pastq/filter.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "propagator.hpp"
#include "schedule.hpp"

namespace pastq {
namespace detail {

InterruptionSchedule build_schedule(std::span<const Interruption> interruptions, double dt, std::size_t n_steps,
                                    Index dim) {
  InterruptionSchedule schedule;
  for (const Interruption& it : interruptions) {
    check_projectors(it.projectors);
    if (it.projectors.front().rows() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "interruption projectors do not match the model dimension");
    }
    schedule[grid_index(it.time, dt, n_steps)].push_back(&it.projectors);
  }
  return schedule;
}

std::vector<double> grid_times(double dt, std::size_t n_steps) {
  std::vector<double> times(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) times[i] = static_cast<double>(i) * dt;
  return times;
}

}  // namespace detail

namespace {

void require_dim(const Model& model, Index dim) {
  if (model.dim != dim) {
    throw Error(ErrorKind::kDimensionMismatch,
                "state has dimension " + std::to_string(dim) + ", model has " + std::to_string(model.dim));
  }
}

DensityMatrix finish(Operator op, double log_norm) {
  const double ln = detail::renormalize(op, ErrorKind::kZeroProbabilityOutcome);
  return DensityMatrix{std::move(op), log_norm + ln};
}

std::size_t count_diffusive(const Model& model) {
  std::size_t n = 0;
  for (const auto& ch : model.channels) n += ch.kind == ChannelKind::kDiffusiveObserved ? 1 : 0;
  return n;
}

// Index of the pointer sector holding the (single-sector) truth state.
int occupied_sector(const Model& model, const Operator& rho) {
  int best = -1;
  double best_p = -1.0;
  for (std::size_t s = 0; s < model.pointer_projectors.size(); ++s) {
    const double p = trace_product(model.pointer_projectors[s], rho).real();
    if (p > best_p) {
      best_p = p;
      best = static_cast<int>(s);
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(RecordKind kind) {
  return kind == RecordKind::kDiffusive ? "diffusive" : "counting";
}

void MeasurementRecord::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw Error(ErrorKind::kInvalidParameter, "record dt must be positive");
  if (kind == RecordKind::kDiffusive) {
    if (diffusive_increments.size() != n_steps) {
      throw Error(ErrorKind::kDimensionMismatch, "diffusive record has " + std::to_string(diffusive_increments.size()) +
                                                     " increments for " + std::to_string(n_steps) + " steps");
    }
    if (!counting_increments.empty()) {
      throw Error(ErrorKind::kInvalidParameter, "diffusive record carries counting increments");
    }
    return;
  }
  if (!diffusive_increments.empty()) {
    throw Error(ErrorKind::kInvalidParameter, "counting record carries diffusive increments");
  }
  for (const auto& series : counting_increments) {
    if (series.size() != n_steps) {
      throw Error(ErrorKind::kDimensionMismatch, "counting series has " + std::to_string(series.size()) +
                                                     " increments for " + std::to_string(n_steps) + " steps");
    }
    for (int n : series) {
      if (n != 0 && n != 1) throw Error(ErrorKind::kInvalidParameter, "dN must be 0 or 1, got " + std::to_string(n));
    }
  }
}

void check_record_matches(const MeasurementRecord& record, const Model& model) {
  const std::string fp = model_fingerprint(model);
  if (record.model_fingerprint != fp) {
    throw Error(ErrorKind::kFingerprintMismatch,
                "record fingerprint '" + record.model_fingerprint + "' does not match model '" + fp + "'");
  }
  record.validate();
  if (record.kind == RecordKind::kCounting && record.counting_increments.size() != model.counting_channel_indices().size()) {
    throw Error(ErrorKind::kDimensionMismatch, "record counting channels do not match the model");
  }
  if (record.kind == RecordKind::kDiffusive && model.has_counting()) {
    throw Error(ErrorKind::kInvalidParameter, "diffusive record replayed through a counting model");
  }
}

DensityMatrix diffusive_step(const DensityMatrix& rho, const Model& model, double dy, double dt) {
  require_dim(model, rho.dim());
  detail::Propagator prop(model, dt);
  if (prop.n_counting() > 0) throw Error(ErrorKind::kInvalidParameter, "diffusive_step on a counting model");
  Operator x = rho.op;
  prop.forward_diffusive(x, dy);
  return finish(std::move(x), rho.log_norm);
}

Operator diffusive_step_linear(const Operator& rho, const Model& model, double dy, double dt) {
  require_dim(model, rho.rows());
  detail::Propagator prop(model, dt);
  if (prop.n_counting() > 0) throw Error(ErrorKind::kInvalidParameter, "diffusive_step on a counting model");
  Operator x = rho;
  prop.forward_diffusive(x, dy);
  return x;
}

DensityMatrix jump_step(const DensityMatrix& rho, const Model& model, std::span<const int> dn, double dt) {
  require_dim(model, rho.dim());
  detail::Propagator prop(model, dt);
  if (prop.n_counting() == 0) throw Error(ErrorKind::kInvalidParameter, "jump_step needs a counting channel");
  Operator x = rho.op;
  prop.forward_counting(x, dn);
  return finish(std::move(x), rho.log_norm);
}

DensityMatrix jump_step(const DensityMatrix& rho, const Model& model, int dn, double dt) {
  const int one[1] = {dn};
  return jump_step(rho, model, std::span<const int>(one), dt);
}

Operator homodyne_kraus(const Model& model, double dy, double dt) {
  model.validate();
  if (model.channels.size() != 1 || model.channels.front().kind != ChannelKind::kDiffusiveObserved ||
      model.channels.front().eta != 1.0) {
    throw Error(ErrorKind::kInvalidParameter, "homodyne_kraus needs a single diffusive channel with eta = 1");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidParameter, "dt must be positive");
  if (!std::isfinite(dy)) throw Error(ErrorKind::kNonFiniteIncrement, "dY is not finite");
  const Operator& c = model.channels.front().lindblad;
  const double pref = std::pow(2.0 * std::numbers::pi * dt, -0.25) * std::exp(-dy * dy / (4.0 * dt));
  Operator omega = identity(model.dim) - Complex{0.0, dt} * model.hamiltonian - (0.5 * dt) * (c.adjoint() * c) + dy * c;
  return pref * omega;
}

DiffusiveSample sample_diffusive_record(const Model& model, const DensityMatrix& rho0, double t_end, double dt,
                                        std::uint64_t seed) {
  require_dim(model, rho0.dim());
  if (count_diffusive(model) != 1) {
    throw Error(ErrorKind::kInvalidParameter, "sample_diffusive_record needs exactly one diffusive channel");
  }
  const std::size_t n = Grid{t_end, dt}.n_steps();
  detail::Propagator prop(model, dt);

  DiffusiveSample out;
  out.record.kind = RecordKind::kDiffusive;
  out.record.dt = dt;
  out.record.n_steps = n;
  out.record.seed = seed;
  out.record.model_fingerprint = model_fingerprint(model);
  out.record.diffusive_increments.resize(n);
  out.innovations.resize(n);
  out.trajectory.times = detail::grid_times(dt, n);
  out.trajectory.states.reserve(n + 1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(dt);

  Operator x = rho0.op;
  double log_norm = rho0.log_norm + detail::renormalize(x, ErrorKind::kInvalidParameter);
  out.trajectory.states.push_back({x, log_norm});
  for (std::size_t i = 0; i < n; ++i) {
    const double dw = sd * normal(rng);
    const double dy = prop.record_mean(x) * dt + dw;
    out.innovations[i] = dw;
    out.record.diffusive_increments[i] = dy;
    prop.forward_diffusive(x, dy);
    log_norm += detail::renormalize(x, ErrorKind::kZeroProbabilityOutcome);
    out.trajectory.states.push_back({x, log_norm});
  }
  return out;
}

JumpSample sample_jump_record(const Model& model, const DensityMatrix& rho0, double t_end, double dt,
                              std::uint64_t seed) {
  require_dim(model, rho0.dim());
  detail::Propagator prop(model, dt);
  if (prop.n_counting() == 0) throw Error(ErrorKind::kInvalidParameter, "sample_jump_record needs a counting channel");
  const std::size_t n = Grid{t_end, dt}.n_steps();

  JumpSample out;
  out.record.kind = RecordKind::kCounting;
  out.record.dt = dt;
  out.record.n_steps = n;
  out.record.seed = seed;
  out.record.model_fingerprint = model_fingerprint(model);
  out.record.counting_increments.assign(prop.n_counting(), std::vector<int>(n, 0));
  out.trajectory.times = detail::grid_times(dt, n);
  out.trajectory.states.reserve(n + 1);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Operator x = rho0.op;
  double log_norm = rho0.log_norm + detail::renormalize(x, ErrorKind::kInvalidParameter);
  out.trajectory.states.push_back({x, log_norm});

  // Truth layer: start inside one pointer sector drawn from rho0.
  Operator truth = x;
  const bool track_sites = !model.pointer_projectors.empty();
  if (track_sites) {
    const double u = uniform(rng);
    double acc = 0.0;
    std::size_t chosen = model.pointer_projectors.size() - 1;
    for (std::size_t s = 0; s < model.pointer_projectors.size(); ++s) {
      acc += trace_product(model.pointer_projectors[s], x).real();
      if (u < acc) {
        chosen = s;
        break;
      }
    }
    const Operator& p = model.pointer_projectors[chosen];
    truth = p * x * p;
    detail::renormalize(truth, ErrorKind::kZeroProbabilityOutcome);
    out.truth.site.reserve(n + 1);
    out.truth.site.push_back(occupied_sector(model, truth));
  }

  std::vector<double> probs(prop.n_channels());
  std::vector<int> dn(prop.n_counting());
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t m = 0; m < probs.size(); ++m) {
      probs[m] = prop.channel_rate(truth, m) * dt;
      total += probs[m];
    }
    if (total > 0.1) {
      throw Error(ErrorKind::kStepTooLarge, "per-step jump probability " + std::to_string(total) + " exceeds 0.1");
    }
    std::fill(dn.begin(), dn.end(), 0);
    const double u = uniform(rng);
    std::optional<std::size_t> fired;
    double acc = 0.0;
    for (std::size_t m = 0; m < probs.size(); ++m) {
      acc += probs[m];
      if (u < acc) {
        fired = m;
        break;
      }
    }
    if (fired) {
      prop.apply_jump(truth, *fired);
      if (prop.channel_is_counting(*fired)) {
        const std::size_t slot = prop.counting_slot(*fired);
        dn[slot] = 1;
        out.record.counting_increments[slot][i] = 1;
      }
    } else {
      prop.no_jump_drift(truth);
    }
    detail::renormalize(truth, ErrorKind::kZeroProbabilityOutcome);
    if (track_sites) out.truth.site.push_back(occupied_sector(model, truth));

    prop.forward_counting(x, dn);
    log_norm += detail::renormalize(x, ErrorKind::kZeroProbabilityOutcome);
    out.trajectory.states.push_back({x, log_norm});
  }
  return out;
}

StateTrajectory run_forward(const MeasurementRecord& record, const Model& model, const DensityMatrix& rho0,
                            std::span<const Interruption> interruptions) {
  check_record_matches(record, model);
  require_dim(model, rho0.dim());
  detail::Propagator prop(model, record.dt);
  const std::size_t n = record.n_steps;
  const auto schedule = detail::build_schedule(interruptions, record.dt, n, model.dim);

  StateTrajectory traj;
  traj.times = detail::grid_times(record.dt, n);
  traj.states.reserve(n + 1);

  Operator x = rho0.op;
  double log_norm = rho0.log_norm + detail::renormalize(x, ErrorKind::kInvalidParameter);
  auto store = [&](std::size_t i) {
    auto it = schedule.find(i);
    if (it != schedule.end()) {
      DensityMatrix before{x, log_norm};
      traj.before_interruption.emplace(i, before);
      for (const auto* projs : it->second) before = projective_map(before, *projs);
      x = before.op;
    }
    traj.states.push_back({x, log_norm});
  };

  store(0);
  std::vector<int> dn(prop.n_counting());
  for (std::size_t i = 0; i < n; ++i) {
    if (record.kind == RecordKind::kDiffusive) {
      prop.forward_diffusive(x, record.diffusive_increments[i]);
    } else {
      for (std::size_t j = 0; j < dn.size(); ++j) dn[j] = record.counting_increments[j][i];
      prop.forward_counting(x, dn);
    }
    log_norm += detail::renormalize(x, ErrorKind::kZeroProbabilityOutcome);
    store(i + 1);
  }
  return traj;
}

}  // namespace pastq
