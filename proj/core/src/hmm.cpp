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

#include "pastq/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pastq {
namespace {

void check_obs(const HmmModel& model, std::span<const int> obs) {
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] < 0 || static_cast<std::size_t>(obs[t]) >= model.n_symbols()) {
      throw Error(ErrorKind::kInvalidParameter,
                  "observation " + std::to_string(obs[t]) + " at position " + std::to_string(t + 1) +
                      " is outside the alphabet of " + std::to_string(model.n_symbols()) + " symbols");
    }
  }
}

void check_stochastic_row(const Eigen::VectorXd& row, const std::string& what) {
  if ((row.array() < 0.0).any() || !row.allFinite()) {
    throw Error(ErrorKind::kSchemaError, what + " has negative or non-finite entries");
  }
  if (std::abs(row.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::kSchemaError, what + " sums to " + std::to_string(row.sum()) + ", not 1");
  }
}

}  // namespace

void HmmModel::validate() const {
  const Index n = initial.size();
  if (n == 0) throw Error(ErrorKind::kSchemaError, "HMM has no states");
  if (transition.rows() != n || transition.cols() != n) {
    throw Error(ErrorKind::kSchemaError, "transition matrix must be n_states x n_states");
  }
  if (emission.rows() != n || emission.cols() == 0) {
    throw Error(ErrorKind::kSchemaError, "emission matrix must be n_states x n_symbols");
  }
  check_stochastic_row(initial, "initial distribution");
  for (Index i = 0; i < n; ++i) {
    check_stochastic_row(transition.row(i).transpose(), "transition row " + std::to_string(i));
    check_stochastic_row(emission.row(i).transpose(), "emission row " + std::to_string(i));
  }
}

ForwardPass hmm_forward(const HmmModel& model, std::span<const int> obs) {
  model.validate();
  check_obs(model, obs);
  ForwardPass out;
  out.alpha.reserve(obs.size() + 1);
  out.log_scale.reserve(obs.size() + 1);
  out.alpha.push_back(model.initial);
  out.log_scale.push_back(0.0);
  double log_scale = 0.0;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    Eigen::VectorXd next = (model.transition.transpose() * out.alpha.back()).cwiseProduct(model.emission.col(obs[t]));
    const double mass = next.sum();
    if (!(mass > 0.0)) {
      throw Error(ErrorKind::kImpossibleObservation, "observation at position " + std::to_string(t + 1) +
                                                         " has zero probability under the model");
    }
    next /= mass;
    log_scale += std::log(mass);
    out.alpha.push_back(std::move(next));
    out.log_scale.push_back(log_scale);
  }
  out.log_likelihood = log_scale;
  return out;
}

BackwardPass hmm_backward(const HmmModel& model, std::span<const int> obs) {
  model.validate();
  check_obs(model, obs);
  const std::size_t T = obs.size();
  BackwardPass out;
  out.beta.resize(T + 1);
  out.log_scale.resize(T + 1);
  out.beta[T] = Eigen::VectorXd::Ones(model.initial.size());
  out.log_scale[T] = 0.0;
  for (std::size_t t = T; t-- > 0;) {
    Eigen::VectorXd prev = model.transition * out.beta[t + 1].cwiseProduct(model.emission.col(obs[t]));
    const double mass = prev.sum();
    if (!(mass > 0.0)) {
      throw Error(ErrorKind::kImpossibleObservation, "observation at position " + std::to_string(t + 1) +
                                                         " has zero probability under the model");
    }
    out.beta[t] = prev / mass;
    out.log_scale[t] = out.log_scale[t + 1] + std::log(mass);
  }
  return out;
}

std::vector<Eigen::VectorXd> hmm_smoothed(const ForwardPass& fwd, const BackwardPass& bwd) {
  if (fwd.alpha.size() != bwd.beta.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "alpha and beta sequences have different lengths");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(fwd.alpha.size());
  for (std::size_t t = 0; t < fwd.alpha.size(); ++t) {
    Eigen::VectorXd p = fwd.alpha[t].cwiseProduct(bwd.beta[t]);
    const double z = p.sum();
    if (!(z > 0.0)) throw Error(ErrorKind::kDegeneratePastState, "smoothing normalizer vanishes at t = " + std::to_string(t));
    out.push_back(p / z);
  }
  return out;
}

HmmPosteriors hmm_posteriors(const HmmModel& model, std::span<const int> obs) {
  HmmPosteriors out;
  out.forward = hmm_forward(model, obs);
  out.backward = hmm_backward(model, obs);
  out.filtered = out.forward.alpha;
  out.smoothed = hmm_smoothed(out.forward, out.backward);
  out.log_likelihood = out.forward.log_likelihood;
  return out;
}

JointOracle hmm_joint_oracle(const HmmModel& model, std::span<const int> obs) {
  model.validate();
  check_obs(model, obs);
  const std::size_t n = model.n_states();
  const std::size_t T = obs.size();
  double paths = 1.0;
  for (std::size_t t = 0; t <= T; ++t) paths *= static_cast<double>(n);
  if (paths > 1e7) {
    throw Error(ErrorKind::kTooLargeForEnumeration,
                std::to_string(n) + "^" + std::to_string(T + 1) + " paths exceed the enumeration limit of 1e7");
  }

  JointOracle out;
  out.filtered.assign(T + 1, Eigen::VectorXd::Zero(static_cast<Index>(n)));
  out.smoothed.assign(T + 1, Eigen::VectorXd::Zero(static_cast<Index>(n)));

  // Every path x_0..x_len is visited once per horizon len; the joint weight of
  // the prefix up to len gives the filtered marginal at len, and the full
  // horizon gives the smoothed marginals.
  std::vector<std::size_t> x;
  for (std::size_t len = 0; len <= T; ++len) {
    x.assign(len + 1, 0);
    while (true) {
      double w = model.initial(static_cast<Index>(x[0]));
      for (std::size_t s = 1; s <= len && w != 0.0; ++s) {
        w *= model.transition(static_cast<Index>(x[s - 1]), static_cast<Index>(x[s])) *
             model.emission(static_cast<Index>(x[s]), obs[s - 1]);
      }
      out.filtered[len](static_cast<Index>(x[len])) += w;
      if (len == T) {
        out.likelihood += w;
        for (std::size_t s = 0; s <= T; ++s) out.smoothed[s](static_cast<Index>(x[s])) += w;
      }
      std::size_t pos = 0;
      while (pos <= len && ++x[pos] == n) x[pos++] = 0;
      if (pos > len) break;
    }
  }
  for (auto& f : out.filtered) {
    const double z = f.sum();
    if (!(z > 0.0)) throw Error(ErrorKind::kImpossibleObservation, "observations have zero probability");
    f /= z;
  }
  for (auto& s : out.smoothed) s /= out.likelihood;
  return out;
}

HmmEmbedding embed_hmm(const HmmModel& model) {
  model.validate();
  const Index n = model.initial.size();
  HmmEmbedding emb;
  Operator rho = Operator::Zero(n, n);
  for (Index i = 0; i < n; ++i) rho(i, i) = model.initial(i);
  emb.rho0 = DensityMatrix{rho, 0.0};

  emb.chain.outcome = "chain";
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double p = model.transition(i, j);
      if (p == 0.0) continue;
      Operator op = Operator::Zero(n, n);
      op(j, i) = std::sqrt(p);
      emb.chain.ops.push_back(std::move(op));
    }
  }
  for (Index y = 0; y < model.emission.cols(); ++y) {
    KrausSet ks;
    ks.outcome = std::to_string(y);
    for (Index i = 0; i < n; ++i) {
      const double p = model.emission(i, y);
      if (p == 0.0) continue;
      Operator op = Operator::Zero(n, n);
      op(i, i) = std::sqrt(p);
      ks.ops.push_back(std::move(op));
    }
    // A symbol no state can emit still needs a (zero) operator of the right size.
    if (ks.ops.empty()) ks.ops.push_back(Operator::Zero(n, n));
    emb.observation.push_back(std::move(ks));
  }
  return emb;
}

EmbeddedPasses run_embedded(const HmmEmbedding& emb, std::span<const int> obs) {
  for (int y : obs) {
    if (y < 0 || static_cast<std::size_t>(y) >= emb.observation.size()) {
      throw Error(ErrorKind::kInvalidParameter, "observation " + std::to_string(y) + " is outside the alphabet");
    }
  }
  const std::size_t T = obs.size();
  EmbeddedPasses out;
  out.rho.reserve(T + 1);
  out.rho.push_back(emb.rho0);
  for (std::size_t t = 0; t < T; ++t) {
    const DensityMatrix moved = kraus_apply(out.rho.back(), emb.chain, NormMode::kTrack).state;
    out.rho.push_back(kraus_apply(moved, emb.observation[static_cast<std::size_t>(obs[t])], NormMode::kTrack).state);
  }
  out.effect.resize(T + 1);
  out.effect[T] = identity_effect(emb.rho0.dim());
  for (std::size_t t = T; t-- > 0;) {
    const EffectMatrix seen = kraus_adjoint_apply(out.effect[t + 1], emb.observation[static_cast<std::size_t>(obs[t])]);
    out.effect[t] = normalized(kraus_adjoint_apply(seen, emb.chain));
  }
  return out;
}

HmmCheckReport hmm_check(const HmmModel& model, std::span<const int> obs, double tol) {
  const HmmPosteriors post = hmm_posteriors(model, obs);
  const HmmEmbedding emb = embed_hmm(model);
  const EmbeddedPasses q = run_embedded(emb, obs);
  const Index n = model.initial.size();

  std::vector<Operator> site(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    site[static_cast<std::size_t>(i)] = Operator::Zero(n, n);
    site[static_cast<std::size_t>(i)](i, i) = 1.0;
  }
  const MeasurementSpec spec = projective_spec(site);

  HmmCheckReport r;
  for (std::size_t t = 0; t <= obs.size(); ++t) {
    const Operator& rho = q.rho[t].op;
    const Operator& e = q.effect[t].op;
    r.alpha_deviation = std::max(r.alpha_deviation, (rho.diagonal().real() - post.forward.alpha[t]).cwiseAbs().maxCoeff());
    r.beta_deviation = std::max(r.beta_deviation, (e.diagonal().real() - post.backward.beta[t]).cwiseAbs().maxCoeff());
    r.log_scale_deviation = std::max({r.log_scale_deviation, std::abs(q.rho[t].log_norm - post.forward.log_scale[t]),
                                      std::abs(q.effect[t].log_norm - post.backward.log_scale[t])});
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i != j) r.offdiagonal = std::max({r.offdiagonal, std::abs(rho(i, j)), std::abs(e(i, j))});
      }
    }
    const auto pp = past_distribution(PastStatePair{q.rho[t], q.effect[t], static_cast<double>(t)}, spec);
    for (Index i = 0; i < n; ++i) {
      r.smoothed_deviation = std::max(r.smoothed_deviation, std::abs(pp[static_cast<std::size_t>(i)] - post.smoothed[t](i)));
    }
  }
  r.likelihood_deviation = std::abs(std::expm1(q.rho.back().log_norm - post.log_likelihood));
  r.pass = r.alpha_deviation <= tol && r.beta_deviation <= tol && r.smoothed_deviation <= tol &&
           r.log_scale_deviation <= tol && r.offdiagonal <= tol && r.likelihood_deviation <= tol;
  return r;
}

}  // namespace pastq
