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
// Parametric ground-truth generators (MNL, NL/CNL, MMNL), the random-model
// generative process, preset models fit to the DVD shopping-cart data,
// transaction simulation, and a basic MNL fitter for the benchmark harness.

#ifndef CHOICEBOUND_MODELS_HPP_
#define CHOICEBOUND_MODELS_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "choicebound/core.hpp"
#include "choicebound/rng.hpp"

namespace cb::models {

/// Multinomial logit: P(j|M) = w_j / sum_{i in M} w_i. weights[0] is pinned
/// to 1 (no-purchase mean utility 0).
struct MnlModel {
  std::vector<double> weights;

  explicit MnlModel(std::vector<double> w);
  int num_products() const { return static_cast<int>(weights.size()); }
};

double mnl_prob(const MnlModel& model, int j, const core::Assortment& m);

/// Nested logit with optional cross-nested no-purchase membership. nests
/// partition products 1..N-1 (empty nests allowed); alpha[l] is the
/// no-purchase membership of nest l with sum_l alpha[l]^rho = 1. A 0/1
/// alpha vector gives the plain NL family; fractional memberships give CNL.
struct NestedLogitModel {
  std::vector<double> weights;
  std::vector<std::vector<int>> nests;
  double rho;
  std::vector<double> alpha;

  NestedLogitModel(std::vector<double> w, std::vector<std::vector<int>> nests,
                   double rho, std::vector<double> alpha);
  int num_products() const { return static_cast<int>(weights.size()); }
};

double nl_prob(const NestedLogitModel& model, int j, const core::Assortment& m);

struct MmnlIntegration {
  enum class Method { Auto, MonteCarlo, GaussHermite };
  Method method = Method::Auto;
  int samples = 100000;  // Monte Carlo draws
  int gh_order = 32;     // Gauss-Hermite order for 1-d mixing
  std::uint64_t seed = 0;
};

/// Mixed MNL with per-coordinate relative taste shocks:
///   beta_i = (1 + eta_i) * theta_i,  eta_i ~ Normal(eta_mean_i, eta_sd^2).
/// Utilities are beta . x_j with x_0 = 0 (no-purchase utility 0). The mixing
/// integral is evaluated by Gauss-Hermite quadrature when theta is scalar and
/// by seeded Monte Carlo otherwise; either way the draw set is fixed at
/// construction, so the model is a bona fide finite mixture of MNL models and
/// every probability it reports is exactly consistent with one choice model.
class MmnlModel {
 public:
  MmnlModel(std::vector<std::vector<double>> features, std::vector<double> theta,
            std::vector<double> eta_mean, double eta_sd,
            MmnlIntegration integration = {});

  int num_products() const { return static_cast<int>(features_.size()) + 1; }
  const std::vector<std::vector<double>>& features() const { return features_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& eta_mean() const { return eta_mean_; }
  double eta_sd() const { return eta_sd_; }
  const MmnlIntegration& integration() const { return integration_; }

  // mixture components: exp_util_[d][j] = exp(beta_d . x_j), weight_[d]
  const std::vector<std::vector<double>>& exp_util() const { return exp_util_; }
  const std::vector<double>& mix_weight() const { return mix_weight_; }

 private:
  std::vector<std::vector<double>> features_;  // per product 1..N-1
  std::vector<double> theta_;
  std::vector<double> eta_mean_;
  double eta_sd_;
  MmnlIntegration integration_;
  std::vector<std::vector<double>> exp_util_;
  std::vector<double> mix_weight_;
};

double mmnl_prob(const MmnlModel& model, int j, const core::Assortment& m);

/// Any ground-truth model the harness can query.
using ChoiceModel =
    std::variant<core::SparseChoiceModel, MnlModel, NestedLogitModel, MmnlModel>;

int num_products(const ChoiceModel& model);
double choice_prob(const ChoiceModel& model, int j, const core::Assortment& m);
double revenue(const ChoiceModel& model, const core::Assortment& m,
               const core::PriceVector& p);

/// Full Plackett-Luce distribution over S_N induced by an MNL model; its
/// choice probabilities coincide with mnl_prob on every assortment.
/// Requires N <= 8.
core::SparseChoiceModel to_rank_distribution(const MnlModel& model);

/// Censored-comparison marginals computed exactly from the model:
/// y_{ij} = P(i | {0,i,j}) for i != 0 and y_{0j} = P(0 | {0,j}).
core::DataVector simulate_pairwise_marginals(const ChoiceModel& model);

/// Transaction marginals y_{i,M} = P(i | M) for each listed assortment,
/// computed exactly from the model.
core::DataVector exact_transaction_marginals(const ChoiceModel& model,
                                             std::vector<core::Assortment> assortments);

struct TransactionCounts {
  int num_products = 0;
  std::vector<core::Assortment> assortments;
  std::vector<std::vector<long long>> counts;  // aligned with assortment members
};

TransactionCounts simulate_transactions(const ChoiceModel& model,
                                        const std::vector<core::Assortment>& assortments,
                                        const std::vector<long long>& arrivals,
                                        rng::Engine& eng);

struct GenerativeSpec {
  int k = 1;
  double a = 1.0;
  double b = 2.0;
  std::uint64_t seed = 0;
};

/// K rank lists uniform with replacement, masses uniform on [a,b] then
/// normalized; duplicate rank lists are merged by summing mass.
core::SparseChoiceModel generate_random_model(const GenerativeSpec& spec, int n);

struct MnlFitResult {
  MnlModel model;
  std::vector<int> pinned;    // products never observed: V forced to -30
  std::vector<int> clamped;   // products whose V hit +-30 with gradient pushing out
  bool converged = false;
  int iterations = 0;
};

/// Maximizes the multinomial log-likelihood over V_1..V_{N-1} (V_0 = 0) by
/// backtracking gradient ascent on the mean log-likelihood; converged when
/// the gradient infinity-norm drops to 1e-6.
MnlFitResult fit_mnl(const TransactionCounts& data, int max_iters = 200000);

// ---- presets and stress-test families ----

/// MNL fit to the Amazon DVD data (15 products + no-purchase). n truncates
/// to the first n-1 products; default keeps all 15.
MnlModel amzn_mnl(int n = 16);
core::PriceVector amzn_prices(int n = 16);
NestedLogitModel amzn_cnl(int n = 16);
MmnlModel amzn_mmnl(int n = 16, MmnlIntegration integration = {});

/// Raw preset table for tests and the CLI.
struct AmznProduct {
  int id;
  double mean_utility;
  double price;
  double price_per_disc;
  double votes;
};
struct AmznTable {
  std::vector<double> theta;  // (theta0, theta1, theta2)
  std::vector<AmznProduct> products;
};
const AmznTable& amzn_table();

MnlModel mnl_rand(int n, rng::Engine& eng);
NestedLogitModel cnl_rand(int n, rng::Engine& eng);
MmnlModel mmnl_rand(int n, double eta_sd, rng::Engine& eng,
                    MmnlIntegration integration = {});

}  // namespace cb::models

#endif  // CHOICEBOUND_MODELS_HPP_
