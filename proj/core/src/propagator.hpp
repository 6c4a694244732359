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

// Allocation-free first-order steppers for the linear (unnormalized) forward
// filter and its exact Hilbert-Schmidt adjoint. Forward and backward updates
// built from the same Propagator satisfy Tr(F(rho) E) = Tr(rho B(E)) to
// rounding, which is what makes Tr(rho~_t E~_t) conserved along a record.

#include <span>
#include <vector>

#include "pastq/error.hpp"
#include "pastq/model.hpp"

namespace pastq::detail {

class Propagator {
 public:
  /// Validates the model and rejects dt * max(||H||, ||sum L^dag L||) > 0.1.
  Propagator(const Model& model, double dt);

  double dt() const { return dt_; }
  Index dim() const { return dim_; }
  bool has_diffusive() const { return has_c_; }
  std::size_t n_counting() const { return counting_.size(); }

  /// rho += [-i[H,rho] + sum_m D[L_m] rho] dt + sqrt(eta) (c rho + rho c^dag) dY.
  /// A nonzero dy_hidden adds the unread (1 - eta) share of the signal, which
  /// only the truth layer of a simulation knows.
  void forward_diffusive(Operator& rho, double dy, double dy_hidden = 0.0);
  /// E += [i[H,E] + sum_m D^dag[L_m] E] dt + sqrt(eta) (c^dag E + E c) dY
  void backward_diffusive(Operator& effect, double dy);

  /// No click: rho += [-i[H,rho] + sum_unobs D[L] rho - 1/2 {L1^dag L1, rho}] dt.
  /// Click in channel j: rho -> L_j rho L_j^dag.
  void forward_counting(Operator& rho, std::span<const int> dn);
  void backward_counting(Operator& effect, std::span<const int> dn);

  /// Pure-state truth unraveling: no-jump drift only (all channels' anticommutator
  /// terms, no sandwich terms).
  void no_jump_drift(Operator& rho);

  /// sqrt(eta) Tr((c + c^dag) rho) / Tr(rho); zero without a diffusive channel.
  double record_mean(const Operator& rho) const;
  /// Same for the hidden (1 - eta) share of the diffusive signal.
  double hidden_record_mean(const Operator& rho) const;
  bool has_hidden_signal() const { return has_c_ && sqrt_hidden_ > 0.0; }

  /// Tr(L^dag L rho) / Tr(rho) for the j-th counting channel.
  double click_rate(const Operator& rho, std::size_t j) const;
  /// Same for an arbitrary channel of the model (used by truth layers).
  double channel_rate(const Operator& rho, std::size_t channel) const;
  /// rho -> L rho L^dag for an arbitrary channel.
  void apply_jump(Operator& rho, std::size_t channel);
  std::size_t n_channels() const { return all_.size(); }
  bool channel_is_counting(std::size_t channel) const;
  std::size_t counting_slot(std::size_t channel) const;

 private:
  struct Jump {
    Operator l;
    Operator l_dag;
    Operator rate;  // L^dag L
    double rate_norm = 0.0;
    ChannelKind kind = ChannelKind::kUnobserved;
  };

  void check_dn(std::span<const int> dn) const;

  double dt_;
  Index dim_;
  bool has_c_ = false;
  double sqrt_eta_ = 1.0;
  double sqrt_hidden_ = 0.0;
  Operator c_;
  Operator g_;                        // -iH - 1/2 sum_all L^dag L
  std::vector<Jump> all_;             // every channel, model order
  std::vector<std::size_t> sandwich_;  // channels with L rho L^dag in the drift
  std::vector<std::size_t> counting_;  // counting channels, record order
  Operator work_, tmp_, acc_;
};

/// Hermitizes x in place, divides by its real trace and returns ln(trace).
/// Throws `failure` when the trace is not finite or not above `min_trace`.
double renormalize(Operator& x, ErrorKind failure, double min_trace = 0.0);

}  // namespace pastq::detail
