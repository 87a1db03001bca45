// Copyright 2026 The mpstomo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brute-force dense references for small systems. Nothing here goes through
// the MPS contraction code: outcome states are assembled directly from the
// Wigner d elements.

#ifndef MPSTOMO_ORACLE_HPP
#define MPSTOMO_ORACLE_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mpstomo/measurement.hpp"
#include "mpstomo/mps.hpp"

namespace mpstomo {

// Unit-norm state vector over q^N levels, site 0 most significant.
struct DenseState {
  Eigen::VectorXcd coefficients;
  int n = 0;
  int q = 2;

  DenseState() = default;
  // Throws ParameterError unless the vector has length q^N and unit norm (1e-12).
  DenseState(Eigen::VectorXcd c, int n, int q);

  static DenseState normalized(Eigen::VectorXcd c, int n, int q);
  static DenseState from_mps(const Mps& mps, std::size_t limit = kDefaultDenseLimit);

  std::size_t dim() const { return static_cast<std::size_t>(coefficients.size()); }
};

// Components of |n, m> = sum_m' e^{-i m' phi} d_{m' m}(theta) |m'>.
Eigen::VectorXcd spin_coherent_state(const Direction& n, int two_s, int level);

// |<{n, m}|psi>|^2 from the explicit product state.
double dense_probability(const DenseState& state, const MeasurementBasis& basis,
                         std::span<const int> levels);

// All q^N outcome probabilities on one basis, indexed like the dense vector.
Eigen::VectorXd dense_distribution(const DenseState& state, const MeasurementBasis& basis);

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// sum_m P ln(P / Q) on one basis; Q clamped below at 1e-300.
double kl_divergence_on_basis(const DenseState& p, const DenseState& q,
                              const MeasurementBasis& basis);

struct KlEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<double> per_basis;
  std::vector<MeasurementBasis> bases;
};

// Monte-Carlo average over uniformly sampled bases, exact sum over outcomes.
KlEstimate kl_divergence(const DenseState& p, const DenseState& q, int n_basis_samples, Rng& rng);

// -ln Tr rho^2 of sites [0, bond] versus the rest.
double dense_renyi2(const DenseState& state, int bond);

// Reduced density matrix of a single site.
Eigen::MatrixXcd dense_site_density(const DenseState& state, int site);

// Mean of -ln |<{n, m}|psi>|^2 over the shots, probabilities clamped at `floor`.
double dense_nll(const DenseState& state, const Dataset& data, double floor = 1e-12);

// Exact outcome distributions on the 2N+1 fixed qubit bases.
std::vector<Eigen::VectorXd> fixed_basis_expectations(const DenseState& state);

// Rebuilds a qubit state from exact fixed-basis distributions: magnitudes from
// the all-z basis, relative phases propagated along hypercube edges from the
// largest coefficient. Coefficients below `zero_floor` are treated as zero; a
// disconnected graph of the remaining ones throws PartialReconstructionError.
DenseState fixed_basis_reconstruct(const std::vector<Eigen::VectorXd>& distributions, int n,
                                   double zero_floor = 1e-6);

double dense_fidelity(const DenseState& a, const DenseState& b);

}  // namespace mpstomo

#endif  // MPSTOMO_ORACLE_HPP
