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
// Experiment drivers: the simulation study over parametric ground truths
// (exact pairwise sales data -> robust lower bound -> relative error) and
// k-fold cross-validation of the robust and fitted-MNL conversion-rate
// predictors on transaction counts.

#ifndef CHOICEBOUND_BENCH_HPP_
#define CHOICEBOUND_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "choicebound/models.hpp"
#include "choicebound/robust.hpp"

namespace cb::bench {

enum class Family { MnlRand, CnlRand, MmnlRand, Amzn, AmznCnl, AmznMmnl };

Family family_from_name(const std::string& name);
const char* family_name(Family family);

/// Instantiates a ground-truth model of the family (the *Rand families draw
/// fresh parameters from the given seed; the presets ignore it except for
/// the MMNL mixing draws).
models::ChoiceModel make_family_instance(Family family, int n, double mmnl_sd,
                                         std::uint64_t seed);

struct ExperimentSpec {
  Family family = Family::MnlRand;
  int n = 6;
  int instances = 10;
  int assortments_per_instance = 10;
  int size_lo = 1;           // products per assortment, excluding product 0
  int size_hi = 0;           // 0 means min(7, n-1)
  std::string method = "brute";  // brute | censored | cut
  int cut_rounds = 8;
  double mmnl_sd = 0.25;
  std::uint64_t seed = 0;
};

struct ErrorRecord {
  int instance = 0;
  int assortment_index = 0;
  std::string assortment;  // comma-separated member ids
  double r_true = 0.0;
  double r_min = 0.0;
  double rel_error = 0.0;  // (r_true - r_min) / r_min
};

struct StudyResult {
  std::vector<ErrorRecord> records;
  std::vector<long long> histogram;  // fixed 0.05-wide bins from 0
  double bin_width = 0.05;
  int excluded = 0;  // infeasible LPs or zero bounds (logged, not recorded)
  double mean_rel_error = 0.0;
  std::string log;
};

/// For each (instance, assortment) cell: build the exact censored-comparison
/// marginals of the ground truth, run the chosen robust minimization, and
/// record the relative error against the exact model revenue. Cells fan out
/// to a worker pool (CHOICEBOUND_WORKERS); results merge in input order.
StudyResult run_simulation_study(const ExperimentSpec& spec);

std::string study_records_csv(const StudyResult& result);
std::string study_histogram_csv(const StudyResult& result);

struct CrossvalOptions {
  int k = 5;
  double z = 3.15;
  long long min_count = 6;  // discard sparser counts as too noisy
  std::uint64_t seed = 0;
};

struct CrossvalRecord {
  int fold = 0;
  int assortment_index = 0;
  std::string assortment;
  double actual = 0.0;        // empirical conversion rate of the test fold
  double robust_pred = 0.0;   // NaN when the interval LP was infeasible
  double mnl_pred = 0.0;
  double robust_rel_error = 0.0;
  double mnl_rel_error = 0.0;
};

struct CrossvalMethodStats {
  double mean_rel_error = 0.0;
  int predictions = 0;
  int skipped = 0;
};

struct CrossvalResult {
  CrossvalMethodStats robust;
  CrossvalMethodStats mnl;
  std::vector<CrossvalRecord> records;
  std::string log;
};

/// Partitions the assortments into k folds (seeded shuffle), trains on k-1
/// folds, and predicts the held-out conversion rates with the robust
/// interval LP and a fitted MNL. Test-fold counts never enter training:
/// fold membership is tagged on load and training tuples filter on it.
CrossvalResult run_kfold_cv(const models::TransactionCounts& transactions,
                            const CrossvalOptions& options);

std::string crossval_records_csv(const CrossvalResult& result);

}  // namespace cb::bench

#endif  // CHOICEBOUND_BENCH_HPP_
