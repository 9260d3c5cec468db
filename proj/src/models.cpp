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

#include "choicebound/models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace cb::models {

using core::Assortment;
using core::DataVector;
using core::ObservationScheme;
using core::RankList;
using core::SparseChoiceModel;

MnlModel::MnlModel(std::vector<double> w) : weights(std::move(w)) {
  require(weights.size() >= 2, ErrorCode::InvalidArgument, "need N >= 2");
  for (double wi : weights)
    require(wi > 0.0 && std::isfinite(wi), ErrorCode::InvalidArgument,
            "MNL weights must be positive and finite");
  require(std::abs(weights[0] - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "w_0 must be 1 (V_0 = 0)");
}

double mnl_prob(const MnlModel& model, int j, const Assortment& m) {
  require(m.contains(j), ErrorCode::InvalidArgument, "product not offered");
  double denom = 0.0;
  for (int i : m) {
    require(i < model.num_products(), ErrorCode::Dimension, "member outside universe");
    denom += model.weights[i];
  }
  return model.weights[j] / denom;
}

NestedLogitModel::NestedLogitModel(std::vector<double> w,
                                   std::vector<std::vector<int>> nests_in,
                                   double rho_in, std::vector<double> alpha_in)
    : weights(std::move(w)),
      nests(std::move(nests_in)),
      rho(rho_in),
      alpha(std::move(alpha_in)) {
  require(weights.size() >= 2, ErrorCode::InvalidArgument, "need N >= 2");
  for (double wi : weights)
    require(wi > 0.0 && std::isfinite(wi), ErrorCode::InvalidArgument,
            "weights must be positive and finite");
  require(rho < 1.0 && rho > 0.0, ErrorCode::InvalidArgument,
          "scale parameter rho must lie in (0,1)");
  require(alpha.size() == nests.size(), ErrorCode::Dimension,
          "one alpha per nest");
  double alpha_norm = 0.0;
  for (double a : alpha) {
    require(a >= 0.0, ErrorCode::InvalidArgument, "alpha must be nonnegative");
    alpha_norm += std::pow(a, rho);
  }
  require(std::abs(alpha_norm - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          "sum of alpha^rho must equal 1");
  std::vector<char> seen(weights.size(), 0);
  seen[0] = 1;
  for (const auto& nest : nests)
    for (int i : nest) {
      require(i >= 1 && i < num_products(), ErrorCode::InvalidArgument,
              "nest member out of range");
      require(!seen[i], ErrorCode::InvalidArgument, "nests must be disjoint");
      seen[i] = 1;
    }
  for (std::size_t i = 1; i < seen.size(); ++i)
    require(seen[i], ErrorCode::InvalidArgument, "nests must cover every product");
}

namespace {

// Effective nest weight w(l, M) = alpha_l * w_0 + sum of member weights in M.
double nest_weight(const NestedLogitModel& model, std::size_t l, const Assortment& m) {
  double w = model.alpha[l] * model.weights[0];
  for (int i : model.nests[l])
    if (m.contains(i)) w += model.weights[i];
  return w;
}

}  // namespace

double nl_prob(const NestedLogitModel& model, int j, const Assortment& m) {
  require(m.contains(j), ErrorCode::InvalidArgument, "product not offered");
  for (int i : m)
    require(i < model.num_products(), ErrorCode::Dimension, "member outside universe");
  double denom = 0.0;
  std::vector<double> wl(model.nests.size());
  for (std::size_t l = 0; l < model.nests.size(); ++l) {
    wl[l] = nest_weight(model, l, m);
    if (wl[l] > 0.0) denom += std::pow(wl[l], model.rho);
  }
  if (j == 0) {
    double bought = 0.0;
    for (int i : m)
      if (i != 0) bought += nl_prob(model, i, m);
    return 1.0 - bought;
  }
  std::size_t lj = 0;
  bool found = false;
  for (std::size_t l = 0; l < model.nests.size() && !found; ++l)
    for (int i : model.nests[l])
      if (i == j) {
        lj = l;
        found = true;
        break;
      }
  require(found, ErrorCode::InvalidArgument, "product not assigned to a nest");
  if (wl[lj] <= 0.0) return 0.0;
  return std::pow(wl[lj], model.rho) / denom * (model.weights[j] / wl[lj]);
}

namespace {

// Gauss-Hermite nodes/weights for weight e^{-x^2} via the Golub-Welsch
// eigen decomposition of the Jacobi matrix.
void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes.resize(order);
  weights.resize(order);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int k = 0; k < order; ++k) {
    nodes[k] = es.eigenvalues()(k);
    double v0 = es.eigenvectors()(0, k);
    weights[k] = sqrt_pi * v0 * v0;
  }
}

}  // namespace

MmnlModel::MmnlModel(std::vector<std::vector<double>> features,
                     std::vector<double> theta, std::vector<double> eta_mean,
                     double eta_sd, MmnlIntegration integration)
    : features_(std::move(features)),
      theta_(std::move(theta)),
      eta_mean_(std::move(eta_mean)),
      eta_sd_(eta_sd),
      integration_(integration) {
  require(!features_.empty(), ErrorCode::InvalidArgument, "need at least 1 product");
  require(eta_sd_ >= 0.0, ErrorCode::InvalidArgument, "eta_sd must be >= 0");
  const std::size_t p = theta_.size();
  require(p >= 1, ErrorCode::InvalidArgument, "empty coefficient vector");
  require(eta_mean_.size() == p, ErrorCode::Dimension,
          "eta_mean dimension must match theta");
  for (const auto& x : features_)
    require(x.size() == p, ErrorCode::Dimension,
            "feature dimension must match theta");

  // Materialize the mixture components once; x_0 = 0 so exp(U_0) = 1.
  std::vector<std::vector<double>> betas;
  if (eta_sd_ == 0.0) {
    std::vector<double> beta(p);
    for (std::size_t i = 0; i < p; ++i) beta[i] = (1.0 + eta_mean_[i]) * theta_[i];
    betas.push_back(std::move(beta));
    mix_weight_.assign(1, 1.0);
  } else if (integration_.method == MmnlIntegration::Method::GaussHermite ||
             (integration_.method == MmnlIntegration::Method::Auto && p == 1)) {
    require(p == 1, ErrorCode::InvalidArgument,
            "Gauss-Hermite integration needs a scalar coefficient");
    std::vector<double> nodes, weights;
    gauss_hermite(integration_.gh_order, nodes, weights);
    const double sqrt_pi = std::sqrt(M_PI);
    double total = 0.0;
    for (int k = 0; k < integration_.gh_order; ++k) {
      double eta = eta_mean_[0] + std::sqrt(2.0) * eta_sd_ * nodes[k];
      betas.push_back({(1.0 + eta) * theta_[0]});
      mix_weight_.push_back(weights[k] / sqrt_pi);
      total += mix_weight_.back();
    }
    for (double& w : mix_weight_) w /= total;
  } else {
    rng::Engine eng(integration_.seed);
    int s = integration_.samples;
    require(s >= 1, ErrorCode::InvalidArgument, "need at least one draw");
    for (int d = 0; d < s; ++d) {
      std::vector<double> beta(p);
      for (std::size_t i = 0; i < p; ++i) {
        double eta = eta_mean_[i] + eta_sd_ * rng::normal(eng);
        beta[i] = (1.0 + eta) * theta_[i];
      }
      betas.push_back(std::move(beta));
    }
    mix_weight_.assign(s, 1.0 / s);
  }

  exp_util_.resize(betas.size());
  const int n = num_products();
  for (std::size_t d = 0; d < betas.size(); ++d) {
    exp_util_[d].assign(n, 1.0);  // product 0
    for (int j = 1; j < n; ++j) {
      double u = 0.0;
      for (std::size_t i = 0; i < p; ++i) u += betas[d][i] * features_[j - 1][i];
      exp_util_[d][j] = std::exp(u);
    }
  }
}

double mmnl_prob(const MmnlModel& model, int j, const Assortment& m) {
  require(m.contains(j), ErrorCode::InvalidArgument, "product not offered");
  for (int i : m)
    require(i < model.num_products(), ErrorCode::Dimension, "member outside universe");
  double prob = 0.0;
  for (std::size_t d = 0; d < model.exp_util().size(); ++d) {
    const auto& eu = model.exp_util()[d];
    double denom = 0.0;
    for (int i : m) denom += eu[i];
    prob += model.mix_weight()[d] * eu[j] / denom;
  }
  return prob;
}

int num_products(const ChoiceModel& model) {
  return std::visit([](const auto& m) { return m.num_products(); }, model);
}

double choice_prob(const ChoiceModel& model, int j, const Assortment& m) {
  struct Visitor {
    int j;
    const Assortment& m;
    double operator()(const SparseChoiceModel& mod) const {
      return core::choice_prob(mod, j, m);
    }
    double operator()(const MnlModel& mod) const { return mnl_prob(mod, j, m); }
    double operator()(const NestedLogitModel& mod) const { return nl_prob(mod, j, m); }
    double operator()(const MmnlModel& mod) const { return mmnl_prob(mod, j, m); }
  };
  return std::visit(Visitor{j, m}, model);
}

double revenue(const ChoiceModel& model, const Assortment& m,
               const core::PriceVector& p) {
  double r = 0.0;
  for (int j : m)
    if (j != 0) r += p[j] * choice_prob(model, j, m);
  return r;
}

SparseChoiceModel to_rank_distribution(const MnlModel& model) {
  const int n = model.num_products();
  require(n <= core::kMaxEnumerableN, ErrorCode::TooLarge,
          "full rank distribution only for N <= 8");
  std::vector<SparseChoiceModel::Atom> atoms;
  double total = 0.0;
  core::for_each_rank_list(n, [&](const RankList& sigma) {
    // Plackett-Luce: pick products best-first with probability proportional
    // to the remaining weights.
    std::vector<int> order = sigma.to_order();
    double rest = std::accumulate(model.weights.begin(), model.weights.end(), 0.0);
    double prob = 1.0;
    for (int pos = 0; pos < n; ++pos) {
      prob *= model.weights[order[pos]] / rest;
      rest -= model.weights[order[pos]];
    }
    atoms.push_back({sigma, prob});
    total += prob;
  });
  for (auto& a : atoms) a.prob /= total;
  double drift = 0.0;
  for (const auto& a : atoms) drift += a.prob;
  atoms.back().prob += 1.0 - drift;
  return SparseChoiceModel(std::move(atoms), n);
}

DataVector simulate_pairwise_marginals(const ChoiceModel& model) {
  const int n = num_products(model);
  auto scheme = ObservationScheme::censored_comparison(n);
  std::vector<double> y(scheme.rows());
  const auto& rows = scheme.row_index();
  for (std::size_t t = 0; t < rows.size(); ++t) {
    int i = rows[t].a, j = rows[t].b;
    if (i == 0)
      y[t] = choice_prob(model, 0, Assortment({j}));
    else if (j == 0)
      y[t] = choice_prob(model, i, Assortment({i}));
    else
      y[t] = choice_prob(model, i, Assortment({i, j}));
  }
  return DataVector(scheme, std::move(y));
}

DataVector exact_transaction_marginals(const ChoiceModel& model,
                                       std::vector<Assortment> assortments) {
  const int n = num_products(model);
  auto scheme = ObservationScheme::transaction(n, std::move(assortments));
  std::vector<double> y(scheme.rows());
  const auto& rows = scheme.row_index();
  for (std::size_t t = 0; t < rows.size(); ++t)
    y[t] = choice_prob(model, rows[t].b, scheme.assortments()[rows[t].a]);
  return DataVector(scheme, std::move(y));
}

TransactionCounts simulate_transactions(const ChoiceModel& model,
                                        const std::vector<Assortment>& assortments,
                                        const std::vector<long long>& arrivals,
                                        rng::Engine& eng) {
  require(arrivals.size() == assortments.size(), ErrorCode::Dimension,
          "one arrival count per assortment");
  TransactionCounts out;
  out.num_products = num_products(model);
  out.assortments = assortments;
  for (std::size_t a = 0; a < assortments.size(); ++a) {
    const Assortment& m = assortments[a];
    std::vector<double> probs;
    for (int j : m) probs.push_back(choice_prob(model, j, m));
    std::vector<long long> counts(probs.size(), 0);
    for (long long arrival = 0; arrival < arrivals[a]; ++arrival) {
      double u = rng::uniform01(eng);
      std::size_t pick = probs.size() - 1;
      double acc = 0.0;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) {
          pick = k;
          break;
        }
      }
      ++counts[pick];
    }
    out.counts.push_back(std::move(counts));
  }
  return out;
}

SparseChoiceModel generate_random_model(const GenerativeSpec& spec, int n) {
  require(spec.k >= 1, ErrorCode::InvalidArgument, "support size must be >= 1");
  require(spec.a > 0.0 && spec.a <= spec.b, ErrorCode::InvalidArgument,
          "need 0 < a <= b");
  rng::Engine eng(spec.seed);
  std::map<std::vector<int>, double> mass;  // merge duplicate rank lists
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  double total = 0.0;
  for (int i = 0; i < spec.k; ++i) {
    rng::shuffle(eng, order);
    double u = rng::uniform(eng, spec.a, spec.b);
    mass[RankList::from_order(order).ranks()] += u;
    total += u;
  }
  std::vector<SparseChoiceModel::Atom> atoms;
  for (auto& [ranks, u] : mass) atoms.push_back({RankList(ranks), u / total});
  double drift = 0.0;
  for (const auto& a : atoms) drift += a.prob;
  atoms.back().prob += 1.0 - drift;
  return SparseChoiceModel(std::move(atoms), n);
}

namespace {

double mean_log_likelihood(const TransactionCounts& data, const std::vector<double>& v,
                           double total) {
  double ll = 0.0;
  for (std::size_t a = 0; a < data.assortments.size(); ++a) {
    const auto& members = data.assortments[a].members();
    double denom = 0.0;
    for (int i : members) denom += std::exp(v[i]);
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (data.counts[a][k] == 0) continue;
      ll += data.counts[a][k] * (v[members[k]] - std::log(denom));
    }
  }
  return ll / total;
}

}  // namespace

MnlFitResult fit_mnl(const TransactionCounts& data, int max_iters) {
  const int n = data.num_products;
  require(n >= 2, ErrorCode::InvalidArgument, "need N >= 2");
  require(data.counts.size() == data.assortments.size(), ErrorCode::Dimension,
          "counts must align with assortments");
  constexpr double kVmax = 30.0;
  constexpr double kGradTol = 1e-6;

  double total = 0.0;
  std::vector<double> observed(n, 0.0);
  for (std::size_t a = 0; a < data.assortments.size(); ++a) {
    const auto& members = data.assortments[a].members();
    require(data.counts[a].size() == members.size(), ErrorCode::Dimension,
            "count row width mismatch");
    for (std::size_t k = 0; k < members.size(); ++k) {
      require(data.counts[a][k] >= 0, ErrorCode::InvalidArgument, "negative count");
      total += data.counts[a][k];
      observed[members[k]] += data.counts[a][k];
    }
  }
  require(total > 0, ErrorCode::InvalidArgument, "no observed transactions");

  MnlFitResult result{MnlModel(std::vector<double>(n, 1.0)), {}, {}, false, 0};
  std::vector<double> v(n, 0.0);
  std::vector<char> pinned(n, 0);
  for (int j = 1; j < n; ++j)
    if (observed[j] == 0.0) {
      pinned[j] = 1;
      v[j] = -kVmax;
      result.pinned.push_back(j);
    }

  // Perfect separation: a product that takes every arrival in each of its
  // training assortments drives its MLE utility to +inf. Pin the surrogate
  // and report it instead of chasing the divergence.
  for (int j = 1; j < n; ++j) {
    if (pinned[j]) continue;
    bool takes_all = true, appears = false;
    for (std::size_t a = 0; a < data.assortments.size() && takes_all; ++a) {
      const auto& members = data.assortments[a].members();
      for (std::size_t k = 0; k < members.size(); ++k) {
        if (members[k] != j) continue;
        appears = true;
        double arrivals = 0.0;
        for (long long c : data.counts[a]) arrivals += c;
        if (arrivals == 0 || data.counts[a][k] != arrivals) takes_all = false;
      }
    }
    if (appears && takes_all) {
      pinned[j] = 1;
      v[j] = kVmax;
      result.clamped.push_back(j);
    }
  }

  std::vector<double> grad(n, 0.0);
  double ll = mean_log_likelihood(data, v, total);
  for (int it = 0; it < max_iters; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t a = 0; a < data.assortments.size(); ++a) {
      const auto& members = data.assortments[a].members();
      double denom = 0.0, arrivals = 0.0;
      for (std::size_t k = 0; k < members.size(); ++k) {
        denom += std::exp(v[members[k]]);
        arrivals += data.counts[a][k];
      }
      for (std::size_t k = 0; k < members.size(); ++k) {
        int j = members[k];
        if (j == 0 || pinned[j]) continue;
        grad[j] += data.counts[a][k] - arrivals * std::exp(v[j]) / denom;
      }
    }
    double gmax = 0.0, gnorm2 = 0.0;
    for (int j = 1; j < n; ++j) {
      grad[j] /= total;
      bool at_bound = (v[j] >= kVmax && grad[j] > 0) || (v[j] <= -kVmax && grad[j] < 0);
      if (pinned[j] || at_bound) continue;
      gmax = std::max(gmax, std::abs(grad[j]));
      gnorm2 += grad[j] * grad[j];
    }
    result.iterations = it;
    if (gmax <= kGradTol) {
      result.converged = true;
      break;
    }
    double step = 4.0;
    std::vector<double> vnew(v);
    for (int back = 0; back < 60; ++back) {
      for (int j = 1; j < n; ++j) {
        if (pinned[j]) continue;
        vnew[j] = std::clamp(v[j] + step * grad[j], -kVmax, kVmax);
      }
      double llnew = mean_log_likelihood(data, vnew, total);
      if (llnew >= ll + 1e-4 * step * gnorm2 || step < 1e-12) {
        v = vnew;
        ll = llnew;
        break;
      }
      step *= 0.5;
    }
  }

  for (int j = 1; j < n; ++j)
    if (!pinned[j] && std::abs(v[j]) >= 12.0) result.clamped.push_back(j);
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = std::exp(v[j]);
  w[0] = 1.0;
  result.model = MnlModel(std::move(w));
  return result;
}

}  // namespace cb::models
