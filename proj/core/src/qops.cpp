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

#include "pastq/qops.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pastq/error.hpp"

namespace pastq {
namespace {

void require_square(const Operator& op, const char* what) {
  if (op.rows() == 0 || op.rows() != op.cols()) {
    std::ostringstream msg;
    msg << what << " must be a non-empty square matrix, got " << op.rows() << "x" << op.cols();
    throw Error(ErrorKind::kInvalidParameter, msg.str());
  }
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension " << a << " vs " << b;
    throw Error(ErrorKind::kDimensionMismatch, msg.str());
  }
}

void require_finite(const Operator& op, const char* what) {
  if (!op.allFinite()) {
    throw Error(ErrorKind::kInvalidParameter, std::string(what) + " has non-finite entries");
  }
}

void check_kraus_set(const KrausSet& ks, Index dim) {
  if (ks.ops.empty()) {
    throw Error(ErrorKind::kInvalidParameter, "Kraus set '" + ks.outcome + "' is empty");
  }
  for (const auto& op : ks.ops) {
    require_same_dim(op.rows(), dim, "Kraus operator rows");
    require_same_dim(op.cols(), dim, "Kraus operator cols");
  }
}

// sum_k O_k X O_k^dag
Operator sandwich(const KrausSet& ks, const Operator& x) {
  Operator out = Operator::Zero(x.rows(), x.cols());
  for (const auto& o : ks.ops) out.noalias() += o * x * o.adjoint();
  return out;
}

// sum_k O_k^dag X O_k
Operator adjoint_sandwich(const KrausSet& ks, const Operator& x) {
  Operator out = Operator::Zero(x.rows(), x.cols());
  for (const auto& o : ks.ops) out.noalias() += o.adjoint() * x * o;
  return out;
}

template <typename T>
T normalize_impl(T x) {
  const double tr = trace(x.op).real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw Error(ErrorKind::kDegeneratePastState, "cannot normalize operator with trace " + std::to_string(tr));
  }
  x.op /= tr;
  x.log_norm += std::log(tr);
  return x;
}

template <typename T>
T projective_map_impl(const T& x, std::span<const Operator> projectors) {
  check_projectors(projectors);
  require_same_dim(x.dim(), projectors.front().rows(), "projective_map");
  T out{Operator::Zero(x.dim(), x.dim()), x.log_norm};
  for (const auto& p : projectors) out.op.noalias() += p * x.op * p;
  return out;
}

}  // namespace

Operator identity(Index dim) { return Operator::Identity(dim, dim); }

Operator dagger(const Operator& a) { return a.adjoint(); }

double max_abs(const Operator& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double hermiticity_error(const Operator& a) { return max_abs(a - a.adjoint()); }

Operator hermitian_part(const Operator& a) { return 0.5 * (a + a.adjoint()); }

Complex trace(const Operator& a) { return a.trace(); }

Complex trace_product(const Operator& a, const Operator& b) {
  // Tr(ab) = sum_ij a_ij b_ji
  return (a.transpose().cwiseProduct(b)).sum();
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

Operator projector(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

Operator outer(const Eigen::VectorXcd& ket, const Eigen::VectorXcd& bra) { return ket * bra.adjoint(); }

DensityMatrix make_density(Operator op) {
  require_square(op, "density matrix");
  require_finite(op, "density matrix");
  const double tr = trace(op).real();
  if (!(tr > 0.0)) throw Error(ErrorKind::kInvalidParameter, "density matrix has non-positive trace");
  return DensityMatrix{op / tr, 0.0};
}

EffectMatrix identity_effect(Index dim) { return EffectMatrix{identity(dim), 0.0}; }

EffectMatrix make_effect(Operator op) {
  require_square(op, "effect matrix");
  require_finite(op, "effect matrix");
  return EffectMatrix{std::move(op), 0.0};
}

DensityMatrix normalized(DensityMatrix rho) { return normalize_impl(std::move(rho)); }

EffectMatrix normalized(EffectMatrix effect) { return normalize_impl(std::move(effect)); }

OperatorReport inspect(const Operator& op) {
  OperatorReport report;
  report.hermiticity_error = hermiticity_error(op);
  const Complex tr = trace(op);
  report.trace_real = tr.real();
  report.trace_imag = tr.imag();
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(op), Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  return report;
}

KrausResult kraus_apply(const DensityMatrix& rho, const KrausSet& ks, NormMode mode) {
  require_square(rho.op, "density matrix");
  check_kraus_set(ks, rho.dim());
  Operator out = sandwich(ks, rho.op);
  const double p = trace(out).real() / trace(rho.op).real();
  if (!(p > kDegenerateThreshold)) {
    throw Error(ErrorKind::kZeroProbabilityOutcome,
                "outcome '" + ks.outcome + "' has probability " + std::to_string(p));
  }
  out = hermitian_part(out);
  out /= trace(out).real();
  const double log_norm = mode == NormMode::kTrack ? rho.log_norm + std::log(p) : rho.log_norm;
  return KrausResult{DensityMatrix{std::move(out), log_norm}, p};
}

EffectMatrix kraus_adjoint_apply(const EffectMatrix& effect, const KrausSet& ks) {
  require_square(effect.op, "effect matrix");
  check_kraus_set(ks, effect.dim());
  return EffectMatrix{adjoint_sandwich(ks, effect.op), effect.log_norm};
}

double completeness_deviation(const MeasurementSpec& spec) {
  if (spec.outcomes.empty()) throw Error(ErrorKind::kInvalidParameter, "measurement has no outcomes");
  const Index dim = spec.dim();
  Operator sum = Operator::Zero(dim, dim);
  for (const auto& ks : spec.outcomes) {
    check_kraus_set(ks, dim);
    for (const auto& o : ks.ops) sum.noalias() += o.adjoint() * o;
  }
  return max_abs(sum - identity(dim));
}

void check_completeness(const MeasurementSpec& spec, double tol) {
  const double dev = completeness_deviation(spec);
  if (dev > tol) {
    std::ostringstream msg;
    msg << "sum of O^dag O deviates from identity by " << dev << " (tolerance " << tol << ")";
    throw Error(ErrorKind::kIncompleteMeasurement, msg.str());
  }
}

std::vector<double> born_distribution(const DensityMatrix& rho, const MeasurementSpec& spec) {
  require_square(rho.op, "density matrix");
  const double norm = trace(rho.op).real();
  std::vector<double> p;
  p.reserve(spec.outcomes.size());
  for (const auto& ks : spec.outcomes) {
    check_kraus_set(ks, rho.dim());
    p.push_back(trace(sandwich(ks, rho.op)).real() / norm);
  }
  return p;
}

std::vector<double> past_distribution(const PastStatePair& pair, const MeasurementSpec& spec) {
  require_same_dim(pair.rho.dim(), pair.effect.dim(), "past state pair");
  std::vector<double> weights;
  weights.reserve(spec.outcomes.size());
  double total = 0.0;
  for (const auto& ks : spec.outcomes) {
    check_kraus_set(ks, pair.rho.dim());
    const double w = trace_product(sandwich(ks, pair.rho.op), pair.effect.op).real();
    weights.push_back(w);
    total += w;
  }
  const double scale = trace(pair.rho.op).real() * trace(pair.effect.op).real();
  if (!(total > kDegenerateThreshold * std::max(scale, 1e-300))) {
    throw Error(ErrorKind::kDegeneratePastState,
                "past distribution normalizer " + std::to_string(total) + " vanishes");
  }
  for (auto& w : weights) w /= total;
  return weights;
}

Operator past_density_matrix(const PastStatePair& pair) {
  require_same_dim(pair.rho.dim(), pair.effect.dim(), "past state pair");
  Operator product = pair.rho.op * pair.effect.op;
  const Complex tr = trace(product);
  if (!(std::abs(tr) > kDegenerateThreshold)) {
    throw Error(ErrorKind::kDegeneratePastState, "Tr(rho E) vanishes");
  }
  product /= tr;
  return product;
}

Complex weak_value(const PastStatePair& pair, const Operator& a) {
  require_same_dim(pair.rho.dim(), a.rows(), "weak value observable");
  const Operator product = pair.rho.op * pair.effect.op;
  const Complex denom = trace(product);
  if (!(std::abs(denom) > kDegenerateThreshold)) {
    throw Error(ErrorKind::kDegeneratePastState, "Tr(rho E) vanishes");
  }
  return trace_product(a, product) / denom;
}

void check_projectors(std::span<const Operator> projectors, double tol) {
  if (projectors.empty()) throw Error(ErrorKind::kNonOrthogonalProjectors, "no projectors given");
  const Index dim = projectors.front().rows();
  Operator sum = Operator::Zero(dim, dim);
  for (std::size_t a = 0; a < projectors.size(); ++a) {
    require_square(projectors[a], "projector");
    require_same_dim(projectors[a].rows(), dim, "projector");
    sum += projectors[a];
    for (std::size_t b = a; b < projectors.size(); ++b) {
      const Operator prod = projectors[a] * projectors[b];
      const double dev = a == b ? max_abs(prod - projectors[a]) : max_abs(prod);
      if (dev > tol) {
        std::ostringstream msg;
        msg << "P_" << a << " P_" << b << " deviates by " << dev;
        throw Error(ErrorKind::kNonOrthogonalProjectors, msg.str());
      }
    }
  }
  const double dev = max_abs(sum - identity(dim));
  if (dev > tol) {
    throw Error(ErrorKind::kNonOrthogonalProjectors,
                "projectors do not resolve the identity (deviation " + std::to_string(dev) + ")");
  }
}

DensityMatrix projective_map(const DensityMatrix& rho, std::span<const Operator> projectors) {
  return projective_map_impl(rho, projectors);
}

EffectMatrix projective_map(const EffectMatrix& effect, std::span<const Operator> projectors) {
  return projective_map_impl(effect, projectors);
}

MeasurementSpec projective_spec(std::span<const Operator> projectors) {
  MeasurementSpec spec;
  for (std::size_t a = 0; a < projectors.size(); ++a) {
    spec.outcomes.push_back(KrausSet{std::to_string(a), {projectors[a]}});
  }
  return spec;
}

MeasurementSpec weak_meter_kraus(const Operator& a, double eps) {
  if (!(eps > 0.0 && eps <= 0.3)) {
    throw Error(ErrorKind::kInvalidParameter, "weak meter eps must lie in (0, 0.3], got " + std::to_string(eps));
  }
  require_square(a, "meter coupling operator");
  require_finite(a, "meter coupling operator");
  MeasurementSpec spec;
  spec.outcomes.push_back(KrausSet{"down", {identity(a.rows()) - 0.5 * eps * eps * a.adjoint() * a}});
  spec.outcomes.push_back(KrausSet{"up", {eps * a}});
  return spec;
}

}  // namespace pastq
