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
// Worst-case revenue estimators over all choice models consistent with the
// observed marginals: the explicit primal LP over rank lists (desk scale),
// the sampled dual, the exact ranking-data dual LP, the general
// cutting-plane procedure over outer relaxations, the censored-comparison
// relaxation, and the interval-constrained conversion-rate LP.

#ifndef CHOICEBOUND_ROBUST_HPP_
#define CHOICEBOUND_ROBUST_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "choicebound/core.hpp"
#include "choicebound/rng.hpp"

namespace cb::robust {

enum class Sense { Min, Max };

/// How the data rows constrain the model. Never inferred from the data:
///   Equality  - A lambda = y (with a +-1e-9 slack band on every row)
///   AtLeast   - A lambda >= y (the censored-comparison relaxation)
///   Interval  - a_t <= (A lambda)_t <= b_t from DataVector::intervals;
///               endpoints outside [0,1] drop the corresponding side.
enum class ConstraintMode { Equality, AtLeast, Interval };

struct RobustQuery {
  core::DataVector data;
  core::Assortment target;
  core::PriceVector prices;
  Sense sense = Sense::Min;
  ConstraintMode mode = ConstraintMode::Equality;
};

enum class BoundStatus { Optimal, Infeasible, Unbounded, RoundLimit };

struct DualCertificate {
  std::vector<double> alpha;  // one entry per data row
  double nu = 0.0;
};

struct RobustResult {
  BoundStatus status = BoundStatus::Optimal;
  double bound = 0.0;
  std::string method;
  std::optional<core::SparseChoiceModel> witness;   // primal methods
  std::optional<DualCertificate> certificate;        // dual methods
  std::vector<double> round_bounds;                  // cutting plane only
  bool certified_exact = false;
  std::string log;
};

/// Exact optimum by enumerating all N! rank-list columns. Requires N <= 8.
/// The witness is an optimal basic feasible solution, so its support size is
/// at most (number of data rows) + 1.
RobustResult robust_bruteforce(const RobustQuery& q);

/// Sampled dual: keeps only the constraints of the sampled rank lists, so the
/// value is an upper bound on the exact minimum. Requires sense = Min and
/// point data. Duplicate samples are deduplicated. Unbounded means too few
/// sampled constraints pin the dual; raise n_samples.
RobustResult robust_sampled_dual(const RobustQuery& q, int n_samples,
                                 rng::Engine& eng);

/// Same, with an explicit sample set (any sampler psi; full enumeration of
/// S_N makes the bound exact).
RobustResult robust_sampled_dual(const RobustQuery& q,
                                 std::span<const core::RankList> samples);

/// Exact polynomial-size dual LP for ranking data, built on the per-(j,d)
/// assignment polytopes (which are integral).
RobustResult robust_ranking_exact(const RobustQuery& q);

/// Outer-relaxation cutting-plane procedure for comparison-family data.
/// Returns a non-decreasing sequence of certified lower bounds (upper bounds
/// for sense = Max); stops early with certified_exact when every separation
/// maximizer is integral, otherwise flags RoundLimit after max_rounds.
RobustResult robust_cutting_plane(const RobustQuery& q, int max_rounds);

/// One-shot censored-comparison relaxation: the dual of A lambda >= y over
/// the min-linearized preference polytope with alpha >= 0. A certified lower
/// bound on the exact minimum. Requires sense = Min and mode = AtLeast.
RobustResult robust_censored_comparison(const RobustQuery& q);

/// One sales-rate observation: `count` purchases of `product` out of `total`
/// arrivals while `assortment` was offered.
struct SaleCount {
  core::Assortment assortment;
  int product = 0;
  long long count = 0;
  long long total = 0;
};

struct IntervalBound {
  core::Assortment assortment;
  int product = 0;
  double lo = 0.0;
  double hi = 1.0;
};

/// Confidence intervals a_t = yhat(1 - z eps), b_t = yhat(1 + z eps) with
/// yhat = count/total and eps = sqrt((1 - yhat)/count). Observations with
/// count <= min_count are discarded as too noisy.
std::vector<IntervalBound> interval_bounds_from_counts(
    std::span<const SaleCount> counts, double z, long long min_count = 6);

/// Worst-case conversion rate of `target` over all models whose sales rates
/// respect the given intervals. Solved over explicit rank-list variables;
/// requires N <= 8.
RobustResult robust_conversion_interval(std::span<const IntervalBound> bounds,
                                        const core::Assortment& target, int n,
                                        Sense sense = Sense::Min);

/// Smallest z for which the interval-constrained problem is feasible, by
/// bisection to the given tolerance.
double find_min_feasible_z(std::span<const SaleCount> counts, int n,
                           double tol = 1e-3, long long min_count = 6);

}  // namespace cb::robust

#endif  // CHOICEBOUND_ROBUST_HPP_
