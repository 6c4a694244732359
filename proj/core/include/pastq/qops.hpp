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

/// @file qops.hpp
/// Dense operator algebra and the measurement-theoretic core.
///
/// Basis convention used throughout the library: index 0 is spin up |u>,
/// index 1 is spin down |d>, sigma_z = diag(1, -1) and sigma_minus |u> = |d>.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pastq/error.hpp"

namespace pastq {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Operator = Eigen::MatrixXcd;

/// Forward-conditioned state. `op` is kept at unit trace by every stepper;
/// `log_norm` accumulates the logarithms of the factors divided out, so the
/// unnormalized state is exp(log_norm) * op.
struct DensityMatrix {
  Operator op;
  double log_norm = 0.0;

  Index dim() const { return op.rows(); }
};

/// Backward-conditioned effect matrix with the same bookkeeping as DensityMatrix.
struct EffectMatrix {
  Operator op;
  double log_norm = 0.0;

  Index dim() const { return op.rows(); }
};

/// All Kraus operators Omega_{k|y} associated with one outcome label y.
struct KrausSet {
  std::string outcome;
  std::vector<Operator> ops;

  Index dim() const { return ops.empty() ? 0 : ops.front().rows(); }
};

struct MeasurementSpec {
  std::vector<KrausSet> outcomes;

  Index dim() const { return outcomes.empty() ? 0 : outcomes.front().dim(); }
};

/// The past quantum state Xi(t) = (rho(t), E(t)).
struct PastStatePair {
  DensityMatrix rho;
  EffectMatrix effect;
  double time = 0.0;
};

/// Normalized denominators at or below this are treated as zero.
inline constexpr double kDegenerateThreshold = 1e-14;

// ---------------------------------------------------------------------------
// Small helpers

Operator identity(Index dim);
Operator dagger(const Operator& a);
double max_abs(const Operator& a);
double hermiticity_error(const Operator& a);
Operator hermitian_part(const Operator& a);
Complex trace(const Operator& a);
/// Tr(a * b) without forming the product.
Complex trace_product(const Operator& a, const Operator& b);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);
/// |psi><psi| for a (not necessarily normalized) column vector.
Operator projector(const Eigen::VectorXcd& psi);
Operator outer(const Eigen::VectorXcd& ket, const Eigen::VectorXcd& bra);

/// Builds a unit-trace DensityMatrix; throws InvalidParameter on a
/// non-finite, non-square or zero-trace operator.
DensityMatrix make_density(Operator op);
EffectMatrix identity_effect(Index dim);
EffectMatrix make_effect(Operator op);

/// Divides op by its (real) trace and moves ln(trace) into log_norm.
/// Throws DegeneratePastState when the trace is not positive.
DensityMatrix normalized(DensityMatrix rho);
EffectMatrix normalized(EffectMatrix effect);

/// Invariant report; positivity is never enforced by clamping, only reported.
struct OperatorReport {
  double hermiticity_error = 0.0;
  double trace_real = 0.0;
  double trace_imag = 0.0;
  double min_eigenvalue = 0.0;
};
OperatorReport inspect(const Operator& op);

// ---------------------------------------------------------------------------
// Measurement operations

enum class NormMode {
  kDiscard,  ///< returned log_norm equals the input log_norm
  kTrack,    ///< returned log_norm += ln(probability)
};

struct KrausResult {
  DensityMatrix state;
  double probability = 0.0;
};

/// rho -> sum_k O_k rho O_k^dag / p with p = Tr(sum_k O_k^dag O_k rho).
/// Throws ZeroProbabilityOutcome when p <= 1e-14.
KrausResult kraus_apply(const DensityMatrix& rho, const KrausSet& ks,
                        NormMode mode = NormMode::kDiscard);

/// E -> sum_k O_k^dag E O_k, unnormalized; log_norm is carried unchanged.
EffectMatrix kraus_adjoint_apply(const EffectMatrix& effect, const KrausSet& ks);

/// Max-entry deviation of sum over outcomes and k of O^dag O from identity.
double completeness_deviation(const MeasurementSpec& spec);
/// Throws IncompleteMeasurement if completeness_deviation(spec) > tol.
void check_completeness(const MeasurementSpec& spec, double tol = 1e-10);

/// Generalized Born rule p(m) = Tr(sum_k O_{k|m} rho O_{k|m}^dag) / Tr(rho).
std::vector<double> born_distribution(const DensityMatrix& rho, const MeasurementSpec& spec);

/// Retrodicted outcome distribution
///   p_p(m) = Tr(sum_k O_{k|m} rho O_{k|m}^dag E) / sum_m' (same for m').
/// Throws DegeneratePastState when the normalizer is <= 1e-14.
std::vector<double> past_distribution(const PastStatePair& pair, const MeasurementSpec& spec);

/// rho_p = rho E / Tr(rho E). Not Hermitian in general, so it is returned as a
/// plain Operator.
Operator past_density_matrix(const PastStatePair& pair);

/// <A>_w = Tr(A rho E) / Tr(rho E). Can be complex and can lie outside the
/// spectrum of A.
Complex weak_value(const PastStatePair& pair, const Operator& a);

/// Unread projective measurement: X -> sum_a P_a X P_a. Throws
/// NonOrthogonalProjectors unless P_a P_b = delta_ab P_a and sum_a P_a = 1
/// within 1e-10.
DensityMatrix projective_map(const DensityMatrix& rho, std::span<const Operator> projectors);
EffectMatrix projective_map(const EffectMatrix& effect, std::span<const Operator> projectors);
void check_projectors(std::span<const Operator> projectors, double tol = 1e-10);

/// One single-operator KrausSet per projector, labelled "0", "1", ...
MeasurementSpec projective_spec(std::span<const Operator> projectors);

/// Weak spin-meter coupling to a system operator A, truncated at second order:
///   outcome "down": I - (eps^2 / 2) A^dag A
///   outcome "up":   eps A
/// The pair is complete only up to O(eps^4); the residual is left in place.
/// Requires 0 < eps <= 0.3.
MeasurementSpec weak_meter_kraus(const Operator& a, double eps);

}  // namespace pastq
