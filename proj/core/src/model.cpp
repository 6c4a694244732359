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

#include "pastq/model.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "pastq/error.hpp"

namespace pastq {
namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void number(double x) { bytes(&x, sizeof x); }
  void integer(std::int64_t x) { bytes(&x, sizeof x); }
  void op(const Operator& m) {
    integer(m.rows());
    integer(m.cols());
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) {
        number(m(i, j).real());
        number(m(i, j).imag());
      }
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::kInvalidParameter, msg);
}

}  // namespace

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kDiffusiveObserved: return "diffusive_observed";
    case ChannelKind::kCountingObserved: return "counting_observed";
    case ChannelKind::kUnobserved: return "unobserved";
  }
  return "unknown";
}

Channel Channel::diffusive(Operator l, double eta) {
  return Channel{std::move(l), ChannelKind::kDiffusiveObserved, eta};
}

Channel Channel::counting(Operator l) { return Channel{std::move(l), ChannelKind::kCountingObserved, 1.0}; }

Channel Channel::unobserved(Operator l) { return Channel{std::move(l), ChannelKind::kUnobserved, 1.0}; }

void Model::validate() const {
  require(dim >= 1, "model dimension must be positive");
  require(hamiltonian.rows() == dim && hamiltonian.cols() == dim, "Hamiltonian dimension mismatch");
  require(hamiltonian.allFinite(), "Hamiltonian has non-finite entries");
  require(hermiticity_error(hamiltonian) <= 1e-12, "Hamiltonian is not Hermitian");
  int diffusive = 0;
  for (const auto& ch : channels) {
    require(ch.lindblad.rows() == dim && ch.lindblad.cols() == dim, "Lindblad operator dimension mismatch");
    require(ch.lindblad.allFinite(), "Lindblad operator has non-finite entries");
    if (ch.kind == ChannelKind::kDiffusiveObserved) {
      ++diffusive;
      require(ch.eta > 0.0 && ch.eta <= 1.0, "detector efficiency must lie in (0, 1]");
    }
  }
  require(diffusive <= 1, "at most one diffusive observed channel is supported");
  for (const auto& p : pointer_projectors) {
    require(p.rows() == dim && p.cols() == dim, "pointer projector dimension mismatch");
  }
}

const Channel* Model::diffusive_channel() const {
  for (const auto& ch : channels) {
    if (ch.kind == ChannelKind::kDiffusiveObserved) return &ch;
  }
  return nullptr;
}

std::vector<std::size_t> Model::counting_channel_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].kind == ChannelKind::kCountingObserved) out.push_back(i);
  }
  return out;
}

Operator pauli(PauliAxis axis) {
  Operator m = Operator::Zero(2, 2);
  const Complex i{0.0, 1.0};
  switch (axis) {
    case PauliAxis::kX:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliAxis::kY:
      m(0, 1) = -i;
      m(1, 0) = i;
      break;
    case PauliAxis::kZ:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case PauliAxis::kPlus:
      m(0, 1) = 1.0;  // |u><d|
      break;
    case PauliAxis::kMinus:
      m(1, 0) = 1.0;  // |d><u|
      break;
  }
  return m;
}

std::optional<PauliAxis> parse_pauli_axis(const std::string& name) {
  if (name == "x") return PauliAxis::kX;
  if (name == "y") return PauliAxis::kY;
  if (name == "z") return PauliAxis::kZ;
  if (name == "+" || name == "plus") return PauliAxis::kPlus;
  if (name == "-" || name == "minus") return PauliAxis::kMinus;
  return std::nullopt;
}

Model build_rabi_spin(Complex chi, double k, double eta) {
  require(std::isfinite(chi.real()) && std::isfinite(chi.imag()), "chi must be finite");
  require(std::isfinite(k) && k >= 0.0, "measurement strength k must be >= 0");
  require(eta > 0.0 && eta <= 1.0, "detector efficiency must lie in (0, 1]");
  Model m;
  m.name = "rabi-spin";
  m.dim = 2;
  m.hamiltonian = 0.5 * (chi * pauli(PauliAxis::kPlus) + std::conj(chi) * pauli(PauliAxis::kMinus));
  m.channels.push_back(Channel::diffusive(std::sqrt(k) * pauli(PauliAxis::kZ), eta));
  m.pointer_projectors = {pauli(PauliAxis::kPlus) * pauli(PauliAxis::kMinus),
                          pauli(PauliAxis::kMinus) * pauli(PauliAxis::kPlus)};
  m.validate();
  return m;
}

std::size_t Grid::n_steps() const {
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(t_end) && t_end >= 0.0, "t_end must be >= 0");
  const double ratio = t_end / dt;
  const double rounded = std::round(ratio);
  require(std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio), "t_end must be an integer multiple of dt");
  return static_cast<std::size_t>(rounded);
}

std::size_t grid_index(double t, double dt, std::size_t n_steps) {
  require(std::isfinite(t) && t >= 0.0, "time must be finite and non-negative");
  const double ratio = t / dt;
  const double rounded = std::round(ratio);
  require(std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio), "time is not on the grid");
  require(rounded <= static_cast<double>(n_steps), "time lies beyond the end of the record");
  return static_cast<std::size_t>(rounded);
}

Operator site_projector(int site) {
  require(site == 0 || site == 1, "site index must be 0 (a) or 1 (b)");
  Operator p = Operator::Zero(4, 4);
  p(2 * site, 2 * site) = 1.0;
  p(2 * site + 1, 2 * site + 1) = 1.0;
  return p;
}

Model build_jumping_atom(const ScenarioConfig& cfg) {
  require(cfg.gamma_a > 0.0 && cfg.gamma_b > 0.0, "site decay rates must be positive");
  require(cfg.r_ab >= 0.0 && cfg.r_ba >= 0.0, "hop rates must be non-negative");
  require(std::isfinite(cfg.omega_a) && std::isfinite(cfg.omega_b), "Rabi frequencies must be finite");

  const auto site_op = [](int s) {
    Operator p = Operator::Zero(2, 2);
    p(s, s) = 1.0;
    return p;
  };
  const auto hop = [](int from, int to) {
    Operator p = Operator::Zero(2, 2);
    p(to, from) = 1.0;
    return p;
  };
  const Operator id2 = identity(2);
  const Operator sp = pauli(PauliAxis::kPlus);
  const Operator sm = pauli(PauliAxis::kMinus);
  const auto kron = [](const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
  };

  Model m;
  m.name = "jumping-atom";
  m.dim = 4;
  m.hamiltonian = kron(site_op(0), 0.5 * cfg.omega_a * (sp + sm)) + kron(site_op(1), 0.5 * cfg.omega_b * (sp + sm));
  m.channels.push_back(Channel::counting(kron(site_op(0), std::sqrt(cfg.gamma_a) * sm) +
                                         kron(site_op(1), std::sqrt(cfg.gamma_b) * sm)));
  m.channels.push_back(Channel::unobserved(std::sqrt(cfg.r_ab) * kron(hop(0, 1), id2)));
  m.channels.push_back(Channel::unobserved(std::sqrt(cfg.r_ba) * kron(hop(1, 0), id2)));
  m.pointer_projectors = {site_projector(0), site_projector(1)};
  m.validate();
  return m;
}

std::vector<std::string> jumping_atom_warnings(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  if (!(cfg.gamma_a < cfg.gamma_b)) {
    out.push_back("gamma_a >= gamma_b: site a is expected to be the low-emission site");
  }
  return out;
}

DensityMatrix rabi_initial_state() {
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = 1.0;
  return DensityMatrix{rho, 0.0};
}

DensityMatrix jumping_atom_initial_state() {
  Operator rho = Operator::Zero(4, 4);
  rho(1, 1) = 0.5;  // |a, d>
  rho(3, 3) = 0.5;  // |b, d>
  return DensityMatrix{rho, 0.0};
}

std::string model_fingerprint(const Model& model) {
  Fnv1a h;
  h.integer(model.dim);
  h.op(model.hamiltonian);
  for (const auto& ch : model.channels) {
    h.integer(static_cast<std::int64_t>(ch.kind));
    h.number(ch.eta);
    h.op(ch.lindblad);
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h.value();
  return out.str();
}

}  // namespace pastq
