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

#include "propagator.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace pastq::detail {
namespace {

double spectral_radius_hermitian(const Operator& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Propagator::Propagator(const Model& model, double dt) : dt_(dt), dim_(model.dim) {
  model.validate();
  if (!(std::isfinite(dt) && dt > 0.0)) throw Error(ErrorKind::kInvalidParameter, "dt must be positive");

  Operator k_total = Operator::Zero(dim_, dim_);
  for (std::size_t i = 0; i < model.channels.size(); ++i) {
    const Channel& ch = model.channels[i];
    Jump j;
    j.l = ch.lindblad;
    j.l_dag = ch.lindblad.adjoint();
    j.rate = j.l_dag * j.l;
    j.rate_norm = spectral_radius_hermitian(j.rate);
    j.kind = ch.kind;
    k_total += j.rate;
    switch (ch.kind) {
      case ChannelKind::kDiffusiveObserved:
        has_c_ = true;
        c_ = ch.lindblad;
        sqrt_eta_ = std::sqrt(ch.eta);
        sqrt_hidden_ = std::sqrt(1.0 - ch.eta);
        sandwich_.push_back(i);
        break;
      case ChannelKind::kCountingObserved:
        counting_.push_back(i);
        break;
      case ChannelKind::kUnobserved:
        sandwich_.push_back(i);
        break;
    }
    all_.push_back(std::move(j));
  }
  if (has_c_ && !counting_.empty()) {
    throw Error(ErrorKind::kInvalidParameter, "models mixing diffusive and counting records are not supported");
  }

  const double scale = dt * std::max(spectral_radius_hermitian(model.hamiltonian), spectral_radius_hermitian(k_total));
  if (scale > 0.1) {
    std::ostringstream msg;
    msg << "dt * max(||H||, ||sum L^dag L||) = " << scale << " exceeds 0.1";
    throw Error(ErrorKind::kStepTooLarge, msg.str());
  }

  g_ = Complex{0.0, -1.0} * model.hamiltonian - 0.5 * k_total;
  if (!has_c_) c_ = Operator::Zero(dim_, dim_);
  work_ = Operator::Zero(dim_, dim_);
  tmp_ = Operator::Zero(dim_, dim_);
  acc_ = Operator::Zero(dim_, dim_);
}

void Propagator::forward_diffusive(Operator& rho, double dy, double dy_hidden) {
  if (!std::isfinite(dy) || !std::isfinite(dy_hidden)) {
    throw Error(ErrorKind::kNonFiniteIncrement, "dY is not finite");
  }
  work_ = dt_ * g_;
  if (has_c_) work_ += (sqrt_eta_ * dy + sqrt_hidden_ * dy_hidden) * c_;
  tmp_.noalias() = work_ * rho;
  acc_ = rho + tmp_ + tmp_.adjoint();
  for (std::size_t i : sandwich_) {
    tmp_.noalias() = all_[i].l * rho;
    acc_.noalias() += dt_ * tmp_ * all_[i].l_dag;
  }
  rho.swap(acc_);
}

void Propagator::backward_diffusive(Operator& effect, double dy) {
  if (!std::isfinite(dy)) throw Error(ErrorKind::kNonFiniteIncrement, "dY is not finite");
  work_ = dt_ * g_;
  if (has_c_) work_ += (sqrt_eta_ * dy) * c_;
  tmp_.noalias() = effect * work_;
  acc_ = effect + tmp_ + tmp_.adjoint();
  for (std::size_t i : sandwich_) {
    tmp_.noalias() = all_[i].l_dag * effect;
    acc_.noalias() += dt_ * tmp_ * all_[i].l;
  }
  effect.swap(acc_);
}

void Propagator::check_dn(std::span<const int> dn) const {
  if (dn.size() != counting_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "expected " + std::to_string(counting_.size()) +
                                                   " counting increments, got " + std::to_string(dn.size()));
  }
  for (int n : dn) {
    if (n != 0 && n != 1) throw Error(ErrorKind::kInvalidParameter, "dN must be 0 or 1, got " + std::to_string(n));
  }
}

void Propagator::forward_counting(Operator& rho, std::span<const int> dn) {
  check_dn(dn);
  bool clicked = false;
  for (std::size_t j = 0; j < dn.size(); ++j) {
    if (dn[j] == 0) continue;
    clicked = true;
    const double rate = click_rate(rho, j);
    if (!(rate > kDegenerateThreshold)) {
      throw Error(ErrorKind::kZeroProbabilityOutcome,
                  "click in counting channel " + std::to_string(j) + " with Tr(L^dag L rho) = " + std::to_string(rate));
    }
    const Jump& ch = all_[counting_[j]];
    tmp_.noalias() = ch.l * rho;
    rho.noalias() = tmp_ * ch.l_dag;
  }
  if (clicked) return;
  tmp_.noalias() = (dt_ * g_) * rho;
  acc_ = rho + tmp_ + tmp_.adjoint();
  for (std::size_t i : sandwich_) {
    tmp_.noalias() = all_[i].l * rho;
    acc_.noalias() += dt_ * tmp_ * all_[i].l_dag;
  }
  rho.swap(acc_);
}

void Propagator::backward_counting(Operator& effect, std::span<const int> dn) {
  check_dn(dn);
  bool clicked = false;
  // Reverse channel order so that the backward pass is the exact adjoint of
  // the forward sequence L_k ... L_1 rho L_1^dag ... L_k^dag.
  for (std::size_t jj = dn.size(); jj-- > 0;) {
    if (dn[jj] == 0) continue;
    clicked = true;
    const Jump& ch = all_[counting_[jj]];
    tmp_.noalias() = ch.l_dag * effect;
    effect.noalias() = tmp_ * ch.l;
    const double tr = effect.trace().real();
    if (!(tr > kDegenerateThreshold * ch.rate_norm)) {
      throw Error(ErrorKind::kDegeneratePastState,
                  "click in counting channel " + std::to_string(jj) + " annihilates the effect matrix");
    }
  }
  if (clicked) return;
  tmp_.noalias() = effect * (dt_ * g_);
  acc_ = effect + tmp_ + tmp_.adjoint();
  for (std::size_t i : sandwich_) {
    tmp_.noalias() = all_[i].l_dag * effect;
    acc_.noalias() += dt_ * tmp_ * all_[i].l;
  }
  effect.swap(acc_);
}

void Propagator::no_jump_drift(Operator& rho) {
  tmp_.noalias() = (dt_ * g_) * rho;
  acc_ = rho + tmp_ + tmp_.adjoint();
  rho.swap(acc_);
}

double Propagator::record_mean(const Operator& rho) const {
  if (!has_c_) return 0.0;
  return sqrt_eta_ * 2.0 * trace_product(c_, rho).real() / rho.trace().real();
}

double Propagator::hidden_record_mean(const Operator& rho) const {
  if (!has_c_) return 0.0;
  return sqrt_hidden_ * 2.0 * trace_product(c_, rho).real() / rho.trace().real();
}

double Propagator::click_rate(const Operator& rho, std::size_t j) const {
  return channel_rate(rho, counting_.at(j));
}

double Propagator::channel_rate(const Operator& rho, std::size_t channel) const {
  return trace_product(all_.at(channel).rate, rho).real() / rho.trace().real();
}

void Propagator::apply_jump(Operator& rho, std::size_t channel) {
  const Jump& ch = all_.at(channel);
  tmp_.noalias() = ch.l * rho;
  rho.noalias() = tmp_ * ch.l_dag;
}

bool Propagator::channel_is_counting(std::size_t channel) const {
  return all_.at(channel).kind == ChannelKind::kCountingObserved;
}

std::size_t Propagator::counting_slot(std::size_t channel) const {
  for (std::size_t j = 0; j < counting_.size(); ++j) {
    if (counting_[j] == channel) return j;
  }
  throw Error(ErrorKind::kInvalidParameter, "channel " + std::to_string(channel) + " is not a counting channel");
}

double renormalize(Operator& x, ErrorKind failure, double min_trace) {
  const Index n = x.rows();
  for (Index i = 0; i < n; ++i) {
    x(i, i) = Complex{x(i, i).real(), 0.0};
    for (Index j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (x(i, j) + std::conj(x(j, i)));
      x(i, j) = avg;
      x(j, i) = std::conj(avg);
    }
  }
  const double tr = x.trace().real();
  if (!std::isfinite(tr) || !(tr > min_trace)) {
    std::ostringstream msg;
    msg << "renormalization failed, trace = " << tr;
    throw Error(failure, msg.str());
  }
  x /= tr;
  return std::log(tr);
}

}  // namespace pastq::detail
