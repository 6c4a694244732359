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

#include <cstdint>
#include <optional>
#include <string_view>
#include <string>
#include <vector>

#include "pastq/qops.hpp"

namespace pastq {

enum class ChannelKind {
  kDiffusiveObserved,
  kCountingObserved,
  kUnobserved,
};

std::string_view to_string(ChannelKind kind);

/// A Lindblad channel L_m. Every channel contributes its full dissipator to the
/// unconditional dynamics; observed channels also produce a record column.
struct Channel {
  Operator lindblad;
  ChannelKind kind = ChannelKind::kUnobserved;
  double eta = 1.0;  ///< detector efficiency, meaningful for diffusive channels

  static Channel diffusive(Operator l, double eta);
  static Channel counting(Operator l);
  static Channel unobserved(Operator l);
};

struct Model {
  std::string name;
  Index dim = 0;
  Operator hamiltonian;  ///< rad/s
  std::vector<Channel> channels;
  /// Optional pointer basis (e.g. the two sites of the jumping atom) used by
  /// simulation truth layers and site-probability outputs.
  std::vector<Operator> pointer_projectors;

  /// Throws InvalidParameter unless H is Hermitian (1e-12), all operators share
  /// dim, eta is in (0, 1], and at most one diffusive channel exists.
  void validate() const;

  const Channel* diffusive_channel() const;
  std::vector<std::size_t> counting_channel_indices() const;
  bool has_counting() const { return !counting_channel_indices().empty(); }
};

enum class PauliAxis { kX, kY, kZ, kPlus, kMinus };

/// 2x2 Pauli and ladder operators in the up = 0, down = 1 basis.
Operator pauli(PauliAxis axis);

/// Parses "x", "y", "z", "+", "-" (also "plus"/"minus").
std::optional<PauliAxis> parse_pauli_axis(const std::string& name);

/// H = (chi sigma_+ + conj(chi) sigma_-) / 2, c = sqrt(k) sigma_z observed with
/// efficiency eta.
Model build_rabi_spin(Complex chi, double k, double eta);

struct Grid {
  double t_end = 0.0;
  double dt = 1e-3;

  /// Throws InvalidParameter unless dt > 0 and t_end / dt is an integer within
  /// 1e-9 relative.
  std::size_t n_steps() const;
};

/// Rounds t onto the grid, throwing InvalidParameter when t is off-grid or
/// outside [0, n_steps * dt].
std::size_t grid_index(double t, double dt, std::size_t n_steps);

struct ScenarioConfig {
  // rabi-spin
  Complex chi{0.0, 2.0};
  double k = 1.0;
  double eta = 1.0;
  // jumping-atom: site a = 0, site b = 1
  double gamma_a = 0.5;
  double gamma_b = 4.0;
  double r_ab = 0.05;  ///< hop rate a -> b
  double r_ba = 0.05;  ///< hop rate b -> a
  double omega_a = 2.0;
  double omega_b = 2.0;

  Grid grid{5.0, 1e-3};
  std::uint64_t seed = 7;
};

/// Site (2) x internal (2) model, basis index = 2 * site + internal.
/// One counting channel collects photons from both sites; the two hop channels
/// are unobserved.
Model build_jumping_atom(const ScenarioConfig& cfg);

/// Human-readable warnings for parameter choices that break the low (a) /
/// high (b) emission-rate convention.
std::vector<std::string> jumping_atom_warnings(const ScenarioConfig& cfg);

/// |site><site| (x) I_2 for the jumping-atom basis.
Operator site_projector(int site);

/// rho_0 = |u><u|.
DensityMatrix rabi_initial_state();
/// Both sites equally likely, internal ground state.
DensityMatrix jumping_atom_initial_state();

/// FNV-1a digest over the model's operators and channel tags, hex encoded.
std::string model_fingerprint(const Model& model);

}  // namespace pastq
