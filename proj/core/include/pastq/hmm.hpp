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

// Discrete hidden Markov models: scaled forward-backward smoothing, a
// brute-force enumeration oracle, and the embedding of a chain into diagonal
// density and effect matrices.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pastq/qops.hpp"

namespace pastq {

/// Row-stochastic orientation: transition(i, j) = P(X_{t+1} = j | X_t = i),
/// emission(i, y) = P(Y_t = y | X_t = i).
struct HmmModel {
  Eigen::MatrixXd transition;
  Eigen::MatrixXd emission;
  Eigen::VectorXd initial;

  std::size_t n_states() const { return static_cast<std::size_t>(initial.size()); }
  std::size_t n_symbols() const { return static_cast<std::size_t>(emission.cols()); }
  /// Throws SchemaError on shape mismatch, negative entries, or rows/initial
  /// not summing to 1 within 1e-12.
  void validate() const;
};

/// Observations y_1..y_T are stored as obs[0..T-1]; index t in every per-time
/// sequence below runs over 0..T.
using Observations = std::vector<int>;

/// alpha[t] sums to 1; the true alpha_t is exp(log_scale[t]) * alpha[t].
struct ForwardPass {
  std::vector<Eigen::VectorXd> alpha;
  std::vector<double> log_scale;
  double log_likelihood = 0.0;
};

/// beta[T] is all ones with log_scale 0; earlier beta[t] sum to 1 and the true
/// beta_t is exp(log_scale[t]) * beta[t].
struct BackwardPass {
  std::vector<Eigen::VectorXd> beta;
  std::vector<double> log_scale;
};

struct HmmPosteriors {
  ForwardPass forward;
  BackwardPass backward;
  std::vector<Eigen::VectorXd> filtered;
  std::vector<Eigen::VectorXd> smoothed;
  double log_likelihood = 0.0;
};

ForwardPass hmm_forward(const HmmModel& model, std::span<const int> obs);
BackwardPass hmm_backward(const HmmModel& model, std::span<const int> obs);
std::vector<Eigen::VectorXd> hmm_smoothed(const ForwardPass& fwd, const BackwardPass& bwd);
HmmPosteriors hmm_posteriors(const HmmModel& model, std::span<const int> obs);

struct JointOracle {
  std::vector<Eigen::VectorXd> filtered;
  std::vector<Eigen::VectorXd> smoothed;
  double likelihood = 0.0;
};

/// Exact marginals by enumerating every state path. Throws
/// TooLargeForEnumeration when n_states^(T+1) > 1e7.
JointOracle hmm_joint_oracle(const HmmModel& model, std::span<const int> obs);

/// Quantum embedding: rho0 = diag(initial), chain Kraus operators
/// sqrt(P(j|i)) |j><i|, observation Kraus operators sqrt(P(y|i)) |i><i|.
struct HmmEmbedding {
  DensityMatrix rho0;
  KrausSet chain;
  std::vector<KrausSet> observation;  ///< indexed by symbol
};

HmmEmbedding embed_hmm(const HmmModel& model);

/// rho[t] and effect[t] for t = 0..T, both normalized with tracked log_norm:
/// forward per step applies the chain map then the observation map; backward
/// applies the adjoint maps in reverse starting from E_T = I.
struct EmbeddedPasses {
  std::vector<DensityMatrix> rho;
  std::vector<EffectMatrix> effect;
};

EmbeddedPasses run_embedded(const HmmEmbedding& emb, std::span<const int> obs);

struct HmmCheckReport {
  double alpha_deviation = 0.0;      ///< max |diag(rho_t) - alpha_t|
  double beta_deviation = 0.0;       ///< max |diag(E_t) - beta_t|
  double smoothed_deviation = 0.0;   ///< max |past_distribution - smoothed|
  double log_scale_deviation = 0.0;  ///< max |log_norm - log_scale| over both passes
  double offdiagonal = 0.0;          ///< max off-diagonal magnitude on the quantum side
  double likelihood_deviation = 0.0; ///< relative, exp(log_lik) vs Tr(rho~_T)
  bool pass = false;
};

HmmCheckReport hmm_check(const HmmModel& model, std::span<const int> obs, double tol = 1e-10);

}  // namespace pastq
