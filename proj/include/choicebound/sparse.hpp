// Copyright 2026 The ChoiceBound Authors
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
//
// Sparsest-fit recovery of a choice model from noiseless marginals, the
// signature / linear-independence condition checkers behind its uniqueness
// guarantee, recovery phase diagrams, sampling-based sparsification, and the
// optimal-BFS sparsity audit.

#ifndef CHOICEBOUND_SPARSE_HPP_
#define CHOICEBOUND_SPARSE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "choicebound/core.hpp"
#include "choicebound/rng.hpp"

namespace cb::sparse {

enum class FitStatus { Recovered, ConditionViolated };

struct SparsestFitOutput {
  FitStatus status = FitStatus::ConditionViolated;
  std::optional<core::SparseChoiceModel> model;
  std::vector<std::size_t> signature_row;  // creation row d(i) per atom
  std::string reason;                      // set when ConditionViolated
  std::optional<std::size_t> offending_row;
};

struct SparsestFitOptions {
  double tol = 1e-9;     // subset-sum and reconstruction tolerance
  int max_support = 24;  // abort above this (subset sums grow as 2^K)
};

/// The combinatorial recovery algorithm: scan rows by ascending value; a row
/// value that is not a subset sum of the masses found so far starts a new
/// atom, otherwise it fixes the matching atoms' column bits. Columns are then
/// decoded back to rank lists (scheme-specific) and re-encoded to verify.
/// Exact recovery is guaranteed when the generating model satisfies the
/// signature and linear-independence conditions.
SparsestFitOutput sparsest_fit(const core::DataVector& y,
                               const SparsestFitOptions& opts = {});

struct SignatureReport {
  bool ok = false;
  // per atom: a row where it is the only support column with a 1, or -1
  std::vector<long long> witness_row;
};

/// For each support atom, searches for a data row owned by it alone.
SignatureReport check_signature(const core::SparseChoiceModel& model,
                                const core::ObservationScheme& scheme);

enum class IndependenceStatus { Satisfied, Violated, NotFalsified };

struct IndependenceReport {
  IndependenceStatus status = IndependenceStatus::Satisfied;
  std::vector<int> violating_c;  // nonzero integer combination, if found
  int bound_used = 0;            // the C that was searched
};

/// Searches integer combinations c in {-C..C}^K for sum_i c_i lambda_i = 0.
/// Exhaustive (directly or meet-in-the-middle) while the search fits a fixed
/// budget; beyond that falls back to randomized probing and reports
/// NotFalsified instead of Satisfied. C defaults to K.
IndependenceReport check_linear_independence(const core::SparseChoiceModel& model,
                                             int c_bound = 0);

struct PhaseDiagramCell {
  int n = 0;
  int k = 0;
  int trials = 0;
  int recovered = 0;
};

/// Exact-recovery rates of sparsest_fit on generative-model instances over an
/// (N, K) grid. Trials run on a worker pool honoring CHOICEBOUND_WORKERS.
std::vector<PhaseDiagramCell> recovery_phase_diagram(
    core::SchemeKind kind, const std::vector<int>& n_values,
    const std::vector<int>& k_values, int trials, std::uint64_t seed);

/// Empirical sparsification: draws M rank lists from the model, with
///   M = ceil((2 C^2 pmax^2 / eps^2) (log(2C) + C log N)),
/// and returns the empirical distribution; its revenue is within eps of the
/// model's on every assortment of size <= C.
core::SparseChoiceModel sparsify(const core::SparseChoiceModel& model, double eps,
                                 int max_assortment, const core::PriceVector& prices,
                                 rng::Engine& eng);

/// Same bound driven by an arbitrary rank-list sampler.
core::SparseChoiceModel sparsify(
    const std::function<core::RankList(rng::Engine&)>& sampler, int n, double eps,
    int max_assortment, const core::PriceVector& prices, rng::Engine& eng);

std::size_t sparsify_sample_size(int n, double eps, int max_assortment,
                                 double max_price);

struct SparsityAudit {
  std::size_t bfs_support = 0;        // support of the optimal BFS witness
  std::size_t rows = 0;               // data dimension m
  bool bfs_bound_ok = false;          // bfs_support <= m + 1
  std::optional<std::size_t> sparse_support;  // when sparsest_fit recovered
  std::optional<long long> gap;               // bfs_support - sparse_support
};

/// Runs the revenue-minimizing LP and compares its basic feasible witness
/// against the sparsest-fit support.
SparsityAudit bfs_sparsity_audit(const core::DataVector& y,
                                 const core::Assortment& target,
                                 const core::PriceVector& prices);

}  // namespace cb::sparse

#endif  // CHOICEBOUND_SPARSE_HPP_
