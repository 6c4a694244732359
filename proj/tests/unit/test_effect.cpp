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

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pastq/effect.hpp"
#include "pastq/filter.hpp"

namespace pastq {
namespace {

using testing::Rng;

Operator up() { return pauli(PauliAxis::kPlus) * pauli(PauliAxis::kMinus); }

Operator unnormalized(const EffectMatrix& e) { return std::exp(e.log_norm) * e.op; }

Model emitter(double omega, double gamma) {
  Model m;
  m.name = "emitter";
  m.dim = 2;
  m.hamiltonian = 0.5 * omega * pauli(PauliAxis::kX);
  m.channels.push_back(Channel::counting(std::sqrt(gamma) * pauli(PauliAxis::kMinus)));
  return m;
}

TEST(DiffusiveBackstep, TrivialModelLeavesEffectUnchanged) {
  const Model m = build_rabi_spin(0.0, 0.0, 1.0);
  Rng rng(1);
  const EffectMatrix e{testing::random_effect(rng, 2), 0.0};
  const EffectMatrix out = diffusive_backstep(e, m, 0.4, 1e-3);
  EXPECT_LE(max_abs(unnormalized(out) - e.op), 1e-14);
}

TEST(DiffusiveBackstep, UnobservedDissipationAloneKeepsIdentity) {
  Model m;
  m.dim = 2;
  m.hamiltonian = Operator::Zero(2, 2);
  m.channels.push_back(Channel::unobserved(0.7 * pauli(PauliAxis::kMinus)));
  const EffectMatrix out = diffusive_backstep(identity_effect(2), m, 0.1, 1e-3);
  EXPECT_LE(max_abs(unnormalized(out) - identity(2)), 1e-15);
}

TEST(DiffusiveBackstep, RecordTiltsAlongMeasuredAxis) {
  const double k = 1.7;
  const double eta = 0.4;
  const double dy = 0.02;
  const Model m = build_rabi_spin(0.0, k, eta);
  const EffectMatrix out = diffusive_backstep(identity_effect(2), m, dy, 1e-3);
  const Operator expected = identity(2) + 2.0 * std::sqrt(eta * k) * dy * pauli(PauliAxis::kZ);
  EXPECT_LE(max_abs(unnormalized(out) - expected), 1e-14);
}

TEST(DiffusiveBackstep, ExactAdjointOfForwardStep) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Model m;
    m.dim = 3;
    m.hamiltonian = testing::random_hermitian(rng, 3);
    m.channels.push_back(Channel::diffusive(0.4 * testing::random_matrix(rng, 3, 3), 0.7));
    m.channels.push_back(Channel::unobserved(0.2 * testing::random_matrix(rng, 3, 3)));
    const Operator rho = testing::random_density(rng, 3, 3);
    const EffectMatrix e{testing::random_effect(rng, 3), 0.0};
    const double dy = 0.03 * testing::cnormal(rng).real();
    const double dt = 1e-3;
    const Complex lhs = trace_product(diffusive_step_linear(rho, m, dy, dt), e.op);
    const Complex rhs = trace_product(rho, unnormalized(diffusive_backstep(e, m, dy, dt)));
    EXPECT_LE(std::abs(lhs - rhs), 1e-13 * std::abs(lhs));
  }
}

TEST(JumpBackstep, NoClickFromIdentity) {
  const double gamma = 2.0;
  const double dt = 1e-3;
  const EffectMatrix out = jump_backstep(identity_effect(2), emitter(0.0, gamma), 0, dt);
  Operator expected = identity(2);
  expected(0, 0) = 1.0 - gamma * dt;
  EXPECT_LE(max_abs(unnormalized(out) - expected), 1e-15);
}

TEST(JumpBackstep, ClickRetrodictsExcitedState) {
  const EffectMatrix out = jump_backstep(identity_effect(2), emitter(0.0, 2.0), 1, 1e-3);
  EXPECT_LE(max_abs(out.op - up()), 1e-15);
  EXPECT_NEAR(out.log_norm, std::log(2.0), 1e-15);
}

TEST(JumpBackstep, ZeroRateLeavesEffectUnchanged) {
  Rng rng(3);
  const EffectMatrix e{testing::random_effect(rng, 2), 0.0};
  const EffectMatrix out = jump_backstep(e, emitter(0.0, 0.0), 0, 1e-3);
  EXPECT_LE(max_abs(unnormalized(out) - e.op), 1e-14);
}

TEST(JumpBackstep, ClickInconsistentWithEveryStateIsDegenerate) {
  // A decay click leaves the emitter in |d>, so a later record demanding |u>
  // right after the click cannot be explained by any state.
  EffectMatrix e{up(), 0.0};
  try {
    jump_backstep(e, emitter(0.0, 1.0), 1, 1e-3);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kDegeneratePastState);
  }
}

TEST(RunBackward, EmptyRecord) {
  const Model m = build_rabi_spin(Complex{0.0, 2.0}, 1.0, 1.0);
  MeasurementRecord rec;
  rec.model_fingerprint = model_fingerprint(m);
  const auto traj = run_backward(rec, m);
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_EQ(traj.effects[0].op, identity(2));
  EXPECT_EQ(traj.effects[0].log_norm, 0.0);
}

TEST(RunBackward, TrivialModelZeroRecord) {
  const Model m = build_rabi_spin(0.0, 0.0, 1.0);
  MeasurementRecord rec;
  rec.n_steps = 50;
  rec.diffusive_increments.assign(50, 0.0);
  rec.model_fingerprint = model_fingerprint(m);
  const auto traj = run_backward(rec, m);
  for (const auto& e : traj.effects) EXPECT_LE(max_abs(unnormalized(e) - identity(2)), 1e-13);
}

TEST(RunBackward, ConsumesIncrementsInReverseAlignment) {
  const Model m = build_rabi_spin(0.0, 1.0, 1.0);
  MeasurementRecord rec;
  rec.n_steps = 10;
  rec.diffusive_increments.assign(10, 0.0);
  rec.diffusive_increments[6] = 0.05;  // interval [t_6, t_7]
  rec.model_fingerprint = model_fingerprint(m);
  const auto traj = run_backward(rec, m);
  EXPECT_EQ(traj.effects[10].op, identity(2));
  for (std::size_t i = 7; i < 10; ++i) EXPECT_LE(max_abs(traj.effects[i].op - 0.5 * identity(2)), 1e-15) << i;
  for (std::size_t i = 0; i <= 6; ++i) EXPECT_GT(traj.effects[i].op(0, 0).real(), 0.5 + 1e-3) << i;
  const auto fwd = run_forward(rec, m, DensityMatrix{0.5 * identity(2), 0.0});
  for (std::size_t i = 0; i <= 6; ++i) EXPECT_LE(max_abs(fwd.states[i].op - 0.5 * identity(2)), 1e-15) << i;
  for (std::size_t i = 7; i <= 10; ++i) EXPECT_GT(fwd.states[i].op(0, 0).real(), 0.5 + 1e-3) << i;
}

TEST(RunBackward, FinalConditionIsExactIdentity) {
  const Model m = build_jumping_atom(ScenarioConfig{});
  const auto s = sample_jump_record(m, jumping_atom_initial_state(), 2.0, 1e-3, 3);
  const auto traj = run_backward(s.record, m);
  EXPECT_EQ(traj.effects.back().op, identity(4));
  EXPECT_EQ(traj.effects.back().log_norm, 0.0);
}

TEST(RunBackward, HermitianPositiveEverywhere) {
  const Model m = build_rabi_spin(Complex{0.0, 2.0}, 1.0, 0.7);
  const auto s = sample_diffusive_record(m, rabi_initial_state(), 3.0, 1e-3, 12);
  const auto traj = run_backward(s.record, m);
  for (const auto& e : traj.effects) {
    ASSERT_LE(hermiticity_error(e.op), 1e-15);
    ASSERT_GE(inspect(e.op).min_eigenvalue, -1e-8);
  }
}

double conservation_drift(const StateTrajectory& f, const EffectTrajectory& b) {
  const double ref = std::log(trace_product(f.states[0].op, b.effects[0].op).real()) + f.states[0].log_norm +
                     b.effects[0].log_norm;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::log(trace_product(f.states[i].op, b.effects[i].op).real()) + f.states[i].log_norm +
                     b.effects[i].log_norm;
    worst = std::max(worst, std::abs(std::expm1(v - ref)));
  }
  return worst;
}

TEST(RunBackward, TwoFilterProductIsConserved) {
  const double dt = 1e-3;
  const Model m = build_rabi_spin(Complex{0.0, 2.0}, 1.0, 1.0);
  const auto s = sample_diffusive_record(m, rabi_initial_state(), 5.0, dt, 31);
  EXPECT_LE(conservation_drift(run_forward(s.record, m, rabi_initial_state()), run_backward(s.record, m)), 100 * dt);

  const Model jm = build_jumping_atom(ScenarioConfig{});
  const auto js = sample_jump_record(jm, jumping_atom_initial_state(), 10.0, dt, 31);
  EXPECT_LE(conservation_drift(run_forward(js.record, jm, jumping_atom_initial_state()), run_backward(js.record, jm)),
            100 * dt);
}

TEST(RunBackward, InterruptionAppliesBackwardMap) {
  const Model m = build_rabi_spin(Complex{0.0, 2.0}, 1.0, 1.0);
  const auto s = sample_diffusive_record(m, rabi_initial_state(), 2.0, 1e-3, 6);
  const std::vector<Interruption> cuts{{1.0, m.pointer_projectors}};
  const auto traj = run_backward(s.record, m, cuts);
  const auto& after = traj.effects[1000];
  const auto& before = traj.before_interruption.at(1000);
  EXPECT_GT(std::abs(after.op(0, 1)), 1e-4);
  EXPECT_LE(std::abs(before.op(0, 1)), 0.0);
  EXPECT_LE(max_abs(before.op - projective_map(after, m.pointer_projectors).op), 0.0);
  const auto f = run_forward(s.record, m, rabi_initial_state(), cuts);
  EXPECT_LE(conservation_drift(f, traj), 100 * 1e-3);
}

}  // namespace
}  // namespace pastq
