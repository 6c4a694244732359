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

#include <random>

#include <benchmark/benchmark.h>

#include "pastq/pastq.hpp"

namespace {

using namespace pastq;

const Model& rabi() {
  static const Model m = build_rabi_spin(Complex{0.0, 2.0}, 1.0, 1.0);
  return m;
}

const Model& atom() {
  static const Model m = build_jumping_atom(ScenarioConfig{});
  return m;
}

void BM_DiffusiveStep(benchmark::State& state) {
  // Steps from a fixed state: chaining unconditioned noise would drift out of the physical set.
  const DensityMatrix rho0 = rabi_initial_state();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> dw(0.0, std::sqrt(1e-3));
  for (auto _ : state) {
    auto rho = diffusive_step(rho0, rabi(), dw(rng), 1e-3);
    benchmark::DoNotOptimize(rho.op.data());
  }
}
BENCHMARK(BM_DiffusiveStep);

void BM_JumpStepNoClick(benchmark::State& state) {
  DensityMatrix rho = jumping_atom_initial_state();
  const int dn = 0;
  for (auto _ : state) {
    rho = jump_step(rho, atom(), dn, 1e-3);
    benchmark::DoNotOptimize(rho.op.data());
  }
}
BENCHMARK(BM_JumpStepNoClick);

void BM_SampleDiffusiveRecord(benchmark::State& state) {
  const double t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto s = sample_diffusive_record(rabi(), rabi_initial_state(), t_end, 1e-3, 7);
    benchmark::DoNotOptimize(s.record.diffusive_increments.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_SampleDiffusiveRecord)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SmoothDiffusive(benchmark::State& state) {
  const auto s = sample_diffusive_record(rabi(), rabi_initial_state(), static_cast<double>(state.range(0)), 1e-3, 3);
  for (auto _ : state) {
    auto traj = smooth(s.record, rabi(), rabi_initial_state());
    benchmark::DoNotOptimize(traj.pairs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_SmoothDiffusive)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SmoothJumpingAtom(benchmark::State& state) {
  const auto s = sample_jump_record(atom(), jumping_atom_initial_state(), 10.0, 1e-3, 5);
  for (auto _ : state) {
    auto traj = smooth(s.record, atom(), jumping_atom_initial_state());
    benchmark::DoNotOptimize(traj.pairs.data());
  }
}
BENCHMARK(BM_SmoothJumpingAtom)->Unit(benchmark::kMillisecond);

void BM_InterruptedEstimate(benchmark::State& state) {
  const auto s = simulate_interrupted_record(rabi(), rabi_initial_state(), 4.0, 1e-3, 2.0, 11);
  for (auto _ : state) {
    auto g = interrupted_estimates(s.record, rabi(), rabi_initial_state(), 2.0);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_InterruptedEstimate)->Unit(benchmark::kMillisecond);

HmmModel random_hmm(std::size_t n, std::size_t symbols, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  auto simplex = [&](std::size_t k) {
    Eigen::VectorXd v(static_cast<Index>(k));
    for (auto& x : v) x = e(rng);
    return Eigen::VectorXd(v / v.sum());
  };
  HmmModel m;
  m.transition.resize(static_cast<Index>(n), static_cast<Index>(n));
  m.emission.resize(static_cast<Index>(n), static_cast<Index>(symbols));
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    m.transition.row(i) = simplex(n).transpose();
    m.emission.row(i) = simplex(symbols).transpose();
  }
  m.initial = simplex(n);
  return m;
}

void BM_HmmPosteriors(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const HmmModel m = random_hmm(static_cast<std::size_t>(state.range(0)), 3, rng);
  std::vector<int> obs(1000);
  std::uniform_int_distribution<int> y(0, 2);
  for (int& o : obs) o = y(rng);
  for (auto _ : state) {
    auto p = hmm_posteriors(m, obs);
    benchmark::DoNotOptimize(p.log_likelihood);
  }
}
BENCHMARK(BM_HmmPosteriors)->Arg(2)->Arg(8)->Arg(32);

void BM_HmmEmbeddedCheck(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const HmmModel m = random_hmm(static_cast<std::size_t>(state.range(0)), 3, rng);
  std::vector<int> obs(200);
  std::uniform_int_distribution<int> y(0, 2);
  for (int& o : obs) o = y(rng);
  for (auto _ : state) {
    auto r = hmm_check(m, obs);
    benchmark::DoNotOptimize(r.pass);
  }
}
BENCHMARK(BM_HmmEmbeddedCheck)->Arg(2)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
