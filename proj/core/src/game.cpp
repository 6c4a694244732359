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

#include "pastq/game.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "propagator.hpp"

namespace pastq {
namespace {

struct Outcome {
  bool ok = false;
  int hidden = 0;
  double forward_up = 0.0;
  double past_up = 0.0;
};

void require_pointer(const Model& model) {
  if (model.pointer_projectors.size() != 2) {
    throw Error(ErrorKind::kInvalidParameter, "the guessing game needs a two-outcome pointer basis");
  }
}

}  // namespace

ScenarioConfig GameConfig::default_game_scenario() {
  ScenarioConfig s;
  s.chi = Complex{0.0, 2.0};
  s.k = 1.0;
  s.eta = 1.0;
  s.grid = Grid{4.0, 1e-3};
  return s;
}

GameConfig GameConfig::defaults() {
  GameConfig cfg;
  cfg.t0 = cfg.scenario.grid.t_end / 2.0;
  return cfg;
}

std::size_t histogram_bin(double p) {
  const double clamped = std::clamp(p, 0.0, 1.0);
  return std::min(kHistogramBins - 1, static_cast<std::size_t>(clamped * static_cast<double>(kHistogramBins)));
}

InterruptedSample simulate_interrupted_record(const Model& model, const DensityMatrix& rho0, double t_end,
                                              double dt, double t0, std::uint64_t seed) {
  require_pointer(model);
  if (model.diffusive_channel() == nullptr) {
    throw Error(ErrorKind::kInvalidParameter, "the guessing game needs a diffusive channel");
  }
  const std::size_t n = Grid{t_end, dt}.n_steps();
  const std::size_t i0 = grid_index(t0, dt, n);
  if (i0 == 0 || i0 == n) throw Error(ErrorKind::kInvalidParameter, "t0 must lie strictly inside (0, t_end)");
  detail::Propagator prop(model, dt);

  InterruptedSample out;
  out.record.kind = RecordKind::kDiffusive;
  out.record.dt = dt;
  out.record.n_steps = n;
  out.record.seed = seed;
  out.record.model_fingerprint = model_fingerprint(model);
  out.record.diffusive_increments.resize(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double sd = std::sqrt(dt);
  const bool hidden = prop.has_hidden_signal();

  Operator truth = rho0.op;
  detail::renormalize(truth, ErrorKind::kInvalidParameter);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == i0) {
      const Operator& up = model.pointer_projectors[0];
      const double p_up = trace_product(up, truth).real();
      const int outcome = uniform(rng) < p_up ? 0 : 1;
      const Operator& p = model.pointer_projectors[static_cast<std::size_t>(outcome)];
      truth = p * truth * p;
      detail::renormalize(truth, ErrorKind::kZeroProbabilityOutcome);
      out.truth.projective_outcome = outcome;
    }
    const double dy = prop.record_mean(truth) * dt + sd * normal(rng);
    const double dy_hidden = hidden ? prop.hidden_record_mean(truth) * dt + sd * normal(rng) : 0.0;
    out.record.diffusive_increments[i] = dy;
    prop.forward_diffusive(truth, dy, dy_hidden);
    detail::renormalize(truth, ErrorKind::kZeroProbabilityOutcome);
  }
  return out;
}

GuessProbabilities interrupted_estimates(const MeasurementRecord& record, const Model& model,
                                         const DensityMatrix& rho0, double t0) {
  require_pointer(model);
  check_record_matches(record, model);
  if (record.kind != RecordKind::kDiffusive) throw Error(ErrorKind::kInvalidParameter, "diffusive record expected");
  const std::size_t n = record.n_steps;
  const std::size_t i0 = grid_index(t0, record.dt, n);
  detail::Propagator prop(model, record.dt);

  Operator rho = rho0.op;
  detail::renormalize(rho, ErrorKind::kInvalidParameter);
  for (std::size_t i = 0; i < i0; ++i) {
    prop.forward_diffusive(rho, record.diffusive_increments[i]);
    detail::renormalize(rho, ErrorKind::kZeroProbabilityOutcome);
  }
  Operator e = identity(model.dim);
  for (std::size_t i = n; i-- > i0;) {
    prop.backward_diffusive(e, record.diffusive_increments[i]);
    detail::renormalize(e, ErrorKind::kDegeneratePastState);
  }

  GuessProbabilities g;
  g.forward_up = trace_product(model.pointer_projectors[0], rho).real();
  const DensityMatrix rho_minus{rho, 0.0};
  const auto spec = projective_spec(model.pointer_projectors);
  const PastStatePair pair{projective_map(rho_minus, model.pointer_projectors), EffectMatrix{e, 0.0}, t0};
  g.past_up = past_distribution(pair, spec)[0];
  return g;
}

GameReport guessing_game(const GameConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  const Model model = build_rabi_spin(sc.chi, sc.k, sc.eta);
  const DensityMatrix rho0 = rabi_initial_state();
  const double t_end = sc.grid.t_end;
  const double dt = sc.grid.dt;
  {
    const std::size_t n = sc.grid.n_steps();
    const std::size_t i0 = grid_index(cfg.t0, dt, n);
    if (i0 == 0 || i0 == n) throw Error(ErrorKind::kInvalidParameter, "t0 must lie strictly inside (0, t_end)");
    detail::Propagator guard(model, dt);
  }
  if (cfg.n_trajectories == 0) throw Error(ErrorKind::kInvalidParameter, "n_trajectories must be positive");

  std::vector<Outcome> outcomes(cfg.n_trajectories);
  auto run_one = [&](std::size_t idx) {
    Outcome& o = outcomes[idx];
    try {
      const auto sample = simulate_interrupted_record(model, rho0, t_end, dt, cfg.t0, cfg.base_seed ^ idx);
      const auto g = interrupted_estimates(sample.record, model, rho0, cfg.t0);
      o.hidden = *sample.truth.projective_outcome;
      o.forward_up = g.forward_up;
      o.past_up = g.past_up;
      o.ok = std::isfinite(g.forward_up) && std::isfinite(g.past_up);
    } catch (const Error&) {
      o.ok = false;
    }
  };

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_trajectories));
  if (threads <= 1) {
    for (std::size_t i = 0; i < cfg.n_trajectories; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < cfg.n_trajectories; i += threads) run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  GameReport r;
  r.n = cfg.n_trajectories;
  std::size_t fwd_ok = 0, past_ok = 0;
  double fs = 0.0, fs2 = 0.0, ps = 0.0, ps2 = 0.0, ds = 0.0, ds2 = 0.0;
  for (const Outcome& o : outcomes) {
    if (!o.ok) {
      ++r.failures;
      continue;
    }
    ++r.completed;
    const bool fwd_tie = std::abs(o.forward_up - 0.5) < 1e-12;
    const bool past_tie = std::abs(o.past_up - 0.5) < 1e-12;
    r.forward_ties += fwd_tie ? 1 : 0;
    r.past_ties += past_tie ? 1 : 0;
    const int fwd_guess = (fwd_tie || o.forward_up > 0.5) ? 0 : 1;
    const int past_guess = (past_tie || o.past_up > 0.5) ? 0 : 1;
    fwd_ok += fwd_guess == o.hidden ? 1 : 0;
    past_ok += past_guess == o.hidden ? 1 : 0;
    ++r.forward_histogram[histogram_bin(o.forward_up)];
    ++r.past_histogram[histogram_bin(o.past_up)];

    const double pf = o.hidden == 0 ? o.forward_up : 1.0 - o.forward_up;
    const double pp = o.hidden == 0 ? o.past_up : 1.0 - o.past_up;
    const double lf = std::log(std::max(pf, 1e-300));
    const double lp = std::log(std::max(pp, 1e-300));
    fs += lf;
    fs2 += lf * lf;
    ps += lp;
    ps2 += lp * lp;
    ds += lp - lf;
    ds2 += (lp - lf) * (lp - lf);
  }
  if (static_cast<double>(r.failures) > 1e-3 * static_cast<double>(r.n)) {
    throw Error(ErrorKind::kTrajectoryFailures,
                std::to_string(r.failures) + " of " + std::to_string(r.n) + " game trajectories failed");
  }
  const double m = static_cast<double>(r.completed);
  if (r.completed > 0) {
    r.forward_accuracy = static_cast<double>(fwd_ok) / m;
    r.past_accuracy = static_cast<double>(past_ok) / m;
    r.forward_log_score = fs / m;
    r.past_log_score = ps / m;
  }
  if (r.completed > 1) {
    auto se = [m](double s, double s2) {
      const double var = std::max(0.0, (s2 - s * s / m) / (m - 1.0));
      return std::sqrt(var / m);
    };
    r.forward_log_score_se = se(fs, fs2);
    r.past_log_score_se = se(ps, ps2);
    r.log_score_difference_se = se(ds, ds2);
  }
  return r;
}

}  // namespace pastq
