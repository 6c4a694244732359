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
#include "pastq/hmm.hpp"

namespace pastq {
namespace {

using testing::Rng;

double max_dev(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kIoError;
}

HmmModel two_state() {
  HmmModel m;
  m.transition.resize(2, 2);
  m.transition << 0.9, 0.1, 0.2, 0.8;
  m.emission.resize(2, 2);
  m.emission << 0.7, 0.3, 0.1, 0.9;
  m.initial.resize(2);
  m.initial << 0.6, 0.4;
  return m;
}

TEST(HmmForward, EmptyObservationsGiveInitial) {
  const HmmModel m = two_state();
  const auto f = hmm_forward(m, {});
  ASSERT_EQ(f.alpha.size(), 1u);
  EXPECT_EQ(f.alpha[0], m.initial);
  EXPECT_EQ(f.log_likelihood, 0.0);
}

TEST(HmmForward, DeterministicChainNoiselessEmission) {
  HmmModel m;
  m.transition.resize(3, 3);
  m.transition << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  m.emission = Eigen::MatrixXd::Identity(3, 3);
  m.initial = Eigen::Vector3d(1, 0, 0);
  const std::vector<int> obs{1, 2, 0, 1};
  const auto f = hmm_forward(m, obs);
  for (std::size_t t = 1; t < f.alpha.size(); ++t) {
    EXPECT_DOUBLE_EQ(f.alpha[t](obs[t - 1]), 1.0);
  }
  EXPECT_NEAR(f.log_likelihood, 0.0, 1e-15);
}

TEST(HmmForward, ImpossibleObservation) {
  HmmModel m;
  m.transition = Eigen::MatrixXd::Identity(2, 2);
  m.emission = Eigen::MatrixXd::Identity(2, 2);
  m.initial = Eigen::Vector2d(1, 0);
  const std::vector<int> obs{1};
  EXPECT_EQ(kind_of([&] { hmm_forward(m, obs); }), ErrorKind::kImpossibleObservation);
}

TEST(HmmForward, RejectsOutOfAlphabet) {
  const std::vector<int> obs{0, 2};
  EXPECT_EQ(kind_of([&] { hmm_forward(two_state(), obs); }), ErrorKind::kInvalidParameter);
}

TEST(HmmBackward, FinalIsAllOnes) {
  const std::vector<int> obs{0, 1, 1};
  const auto b = hmm_backward(two_state(), obs);
  EXPECT_EQ(b.beta.back(), Eigen::VectorXd::Ones(2));
  EXPECT_EQ(b.log_scale.back(), 0.0);
}

TEST(HmmBackward, UniformEmissionGivesFlatBeta) {
  HmmModel m = two_state();
  m.emission << 0.5, 0.5, 0.5, 0.5;
  const std::vector<int> obs{0, 1, 1, 0, 1};
  const auto post = hmm_posteriors(m, obs);
  for (std::size_t t = 0; t < post.backward.beta.size(); ++t) {
    const auto& b = post.backward.beta[t];
    EXPECT_NEAR(b.maxCoeff() - b.minCoeff(), 0.0, 1e-15);
    EXPECT_LE(max_dev(post.smoothed[t], post.filtered[t]), 1e-15);
  }
}

TEST(HmmSmoothed, FinalEqualsFiltered) {
  const std::vector<int> obs{0, 1, 1, 0};
  const auto post = hmm_posteriors(two_state(), obs);
  EXPECT_LE(max_dev(post.smoothed.back(), post.filtered.back()), 1e-15);
  for (const auto& s : post.smoothed) EXPECT_NEAR(s.sum(), 1.0, 1e-12);
}

TEST(HmmOracle, OneStateModel) {
  HmmModel m;
  m.transition = Eigen::MatrixXd::Ones(1, 1);
  m.emission.resize(1, 2);
  m.emission << 0.3, 0.7;
  m.initial = Eigen::VectorXd::Ones(1);
  const std::vector<int> obs{0, 1, 1};
  const auto o = hmm_joint_oracle(m, obs);
  for (const auto& v : o.smoothed) EXPECT_DOUBLE_EQ(v(0), 1.0);
  EXPECT_NEAR(o.likelihood, 0.3 * 0.7 * 0.7, 1e-16);
}

TEST(HmmOracle, TwoStateOneStepHandSum) {
  const HmmModel m = two_state();
  const std::vector<int> obs{1};
  // Paths (x0, x1): weight P(x0) P(x1 | x0) P(y = 1 | x1).
  const double w00 = 0.6 * 0.9 * 0.3;
  const double w01 = 0.6 * 0.1 * 0.9;
  const double w10 = 0.4 * 0.2 * 0.3;
  const double w11 = 0.4 * 0.8 * 0.9;
  const double z = w00 + w01 + w10 + w11;
  const auto o = hmm_joint_oracle(m, obs);
  EXPECT_NEAR(o.likelihood, z, 1e-16);
  EXPECT_NEAR(o.smoothed[0](0), (w00 + w01) / z, 1e-15);
  EXPECT_NEAR(o.smoothed[1](1), (w01 + w11) / z, 1e-15);
  EXPECT_NEAR(o.filtered[0](0), 0.6, 1e-16);
  const auto post = hmm_posteriors(m, obs);
  EXPECT_NEAR(std::exp(post.log_likelihood), z, 1e-15);
}

TEST(HmmOracle, GuardsEnumerationSize) {
  Rng rng(1);
  const HmmModel m = testing::random_hmm(rng, 4, 2);
  const std::vector<int> obs(12, 0);
  EXPECT_EQ(kind_of([&] { hmm_joint_oracle(m, obs); }), ErrorKind::kTooLargeForEnumeration);
}

TEST(HmmOracle, RandomModelsMatchForwardBackward) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const HmmModel m = testing::random_hmm(rng, 2 + trial % 2, 2 + trial % 2);
    const auto obs = testing::sample_observations(rng, m, 8);
    const auto post = hmm_posteriors(m, obs);
    const auto o = hmm_joint_oracle(m, obs);
    for (std::size_t t = 0; t <= obs.size(); ++t) {
      ASSERT_LE(max_dev(post.filtered[t], o.filtered[t]), 1e-12);
      ASSERT_LE(max_dev(post.smoothed[t], o.smoothed[t]), 1e-12);
    }
    ASSERT_NEAR(post.log_likelihood, std::log(o.likelihood), 1e-12);
  }
}

TEST(HmmModel, ValidationErrors) {
  HmmModel m = two_state();
  m.transition(0, 0) = 0.95;
  EXPECT_EQ(kind_of([&] { m.validate(); }), ErrorKind::kSchemaError);
  m = two_state();
  m.emission(1, 0) = -0.1;
  m.emission(1, 1) = 1.1;
  EXPECT_EQ(kind_of([&] { m.validate(); }), ErrorKind::kSchemaError);
  m = two_state();
  m.initial = Eigen::Vector3d(0.2, 0.3, 0.5);
  EXPECT_EQ(kind_of([&] { m.validate(); }), ErrorKind::kSchemaError);
}

TEST(EmbedHmm, KrausStructure) {
  const HmmModel m = two_state();
  const auto emb = embed_hmm(m);
  EXPECT_LE(max_abs(emb.rho0.op - Operator(m.initial.cast<Complex>().asDiagonal())), 0.0);
  MeasurementSpec chain{{emb.chain}};
  EXPECT_LE(completeness_deviation(chain), 1e-15);
  MeasurementSpec obs{emb.observation};
  EXPECT_LE(completeness_deviation(obs), 1e-15);
  ASSERT_EQ(emb.observation.size(), 2u);
}

TEST(EmbedHmm, DiagonalsReproduceAlphaBetaAndSmoothing) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const HmmModel m = testing::random_hmm(rng, 3, 3);
    const auto obs = testing::sample_observations(rng, m, 20);
    const auto r = hmm_check(m, obs, 1e-12);
    EXPECT_TRUE(r.pass) << "alpha " << r.alpha_deviation << " beta " << r.beta_deviation << " smoothed "
                        << r.smoothed_deviation << " scale " << r.log_scale_deviation << " offdiag "
                        << r.offdiagonal << " lik " << r.likelihood_deviation;
    EXPECT_EQ(r.offdiagonal, 0.0);
  }
}

TEST(EmbedHmm, OneStateModelHasZeroDeviation) {
  HmmModel m;
  m.transition = Eigen::MatrixXd::Ones(1, 1);
  m.emission.resize(1, 3);
  m.emission << 0.2, 0.3, 0.5;
  m.initial = Eigen::VectorXd::Ones(1);
  const std::vector<int> obs{0, 2, 1, 1};
  const auto r = hmm_check(m, obs);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.alpha_deviation + r.beta_deviation + r.smoothed_deviation, 1e-15);
}

}  // namespace
}  // namespace pastq
