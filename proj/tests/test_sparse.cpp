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

#include "choicebound/sparse.hpp"

#include <cmath>

#include "choicebound/models.hpp"
#include "doctest.h"

using namespace cb::sparse;
using cb::core::Assortment;
using cb::core::DataVector;
using cb::core::ObservationScheme;
using cb::core::PriceVector;
using cb::core::RankList;
using cb::core::SparseChoiceModel;
using cb::core::exact_marginals;
using cb::models::GenerativeSpec;
using cb::models::generate_random_model;

namespace {

bool same_model(const SparseChoiceModel& a, const SparseChoiceModel& b, double tol) {
  if (a.support_size() != b.support_size()) return false;
  for (const auto& atom : a.support()) {
    bool found = false;
    for (const auto& other : b.support())
      if (other.sigma == atom.sigma && std::abs(other.prob - atom.prob) <= tol)
        found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sparsest fit recovers a single rank list from ranking data") {
  auto sigma = RankList::from_order({2, 0, 3, 1});
  SparseChoiceModel truth({{sigma, 1.0}}, 4);
  auto y = exact_marginals(truth, ObservationScheme::ranking(4));
  auto fit = sparsest_fit(y);
  REQUIRE(fit.status == FitStatus::Recovered);
  CHECK(same_model(*fit.model, truth, 1e-12));
  CHECK(fit.signature_row.size() == 1);
}

TEST_CASE("sparsest fit recovers two atoms with disjoint first choices") {
  SparseChoiceModel truth(
      {{RankList::from_order({1, 2, 0, 3}), 0.3},
       {RankList::from_order({3, 0, 2, 1}), 0.7}},
      4);
  auto scheme = ObservationScheme::top_set(4);
  CHECK(check_signature(truth, scheme).ok);
  CHECK(check_linear_independence(truth).status == IndependenceStatus::Satisfied);
  auto fit = sparsest_fit(exact_marginals(truth, scheme));
  REQUIRE(fit.status == FitStatus::Recovered);
  CHECK(same_model(*fit.model, truth, 1e-9));
}

TEST_CASE("equal masses violate linear independence and stop recovery") {
  SparseChoiceModel truth(
      {{RankList::from_order({1, 2, 0}), 0.5}, {RankList::from_order({2, 1, 0}), 0.5}},
      3);
  auto li = check_linear_independence(truth);
  REQUIRE(li.status == IndependenceStatus::Violated);
  double combo = 0.0;
  bool nonzero = false;
  for (std::size_t i = 0; i < truth.support_size(); ++i) {
    combo += li.violating_c[i] * truth.support()[i].prob;
    if (li.violating_c[i] != 0) nonzero = true;
    CHECK(std::abs(li.violating_c[i]) <= li.bound_used);
  }
  CHECK(nonzero);
  CHECK(std::abs(combo) <= 1e-9);

  auto fit = sparsest_fit(exact_marginals(truth, ObservationScheme::comparison(3)));
  CHECK(fit.status == FitStatus::ConditionViolated);
}

TEST_CASE("signature condition reports") {
  // single atom: any row with a 1 works
  SparseChoiceModel one({{RankList::from_order({1, 0, 2}), 1.0}}, 3);
  CHECK(check_signature(one, ObservationScheme::comparison(3)).ok);

  // two lists differing by one adjacent swap still own their reversed rows
  SparseChoiceModel swapped(
      {{RankList::from_order({0, 1, 2, 3}), 0.4},
       {RankList::from_order({0, 2, 1, 3}), 0.6}},
      4);
  auto rep = check_signature(swapped, ObservationScheme::comparison(4));
  CHECK(rep.ok);

  // both atoms prefer the no-purchase option first: every censored row is
  // either shared or zero, so neither atom owns a signature row
  SparseChoiceModel hidden(
      {{RankList::from_order({0, 1, 2}), 0.4}, {RankList::from_order({0, 2, 1}), 0.6}},
      3);
  CHECK(!check_signature(hidden, ObservationScheme::censored_comparison(3)).ok);
}

TEST_CASE("linear independence: trivial and generative cases") {
  SparseChoiceModel one({{RankList::from_order({1, 0, 2}), 1.0}}, 3);
  CHECK(check_linear_independence(one).status == IndependenceStatus::Satisfied);

  int satisfied = 0;
  for (int seed = 0; seed < 100; ++seed) {
    auto model =
        generate_random_model({4, 1.0, 2.0, static_cast<std::uint64_t>(seed)}, 6);
    if (check_linear_independence(model).status == IndependenceStatus::Satisfied)
      ++satisfied;
  }
  CHECK(satisfied == 100);  // probability-1 statement, exercised empirically
}

TEST_CASE("linear independence falls back to probing for large K") {
  std::vector<SparseChoiceModel::Atom> atoms;
  cb::rng::Engine eng(8);
  auto model = generate_random_model({14, 1.0, 2.0, 321}, 8);
  if (model.support_size() >= 13) {
    auto rep = check_linear_independence(model);
    CHECK(rep.status != IndependenceStatus::Violated);
  }
}

TEST_CASE("uniqueness under the two conditions (executable Theorem)") {
  int checked = 0;
  for (int seed = 0; seed < 30; ++seed) {
    auto model =
        generate_random_model({3, 1.0, 2.0, static_cast<std::uint64_t>(seed)}, 6);
    for (auto scheme :
         {ObservationScheme::ranking(6), ObservationScheme::comparison(6)}) {
      if (!check_signature(model, scheme).ok) continue;
      if (check_linear_independence(model).status != IndependenceStatus::Satisfied)
        continue;
      auto fit = sparsest_fit(exact_marginals(model, scheme));
      REQUIRE(fit.status == FitStatus::Recovered);
      CHECK(same_model(*fit.model, model, 1e-9));
      ++checked;
    }
  }
  CHECK(checked >= 40);  // the conditions hold for most generated instances
}

TEST_CASE("reconstruction identity on recovered instances") {
  for (int seed = 100; seed < 110; ++seed) {
    auto model =
        generate_random_model({4, 1.0, 2.0, static_cast<std::uint64_t>(seed)}, 7);
    auto scheme = ObservationScheme::ranking(7);
    auto y = exact_marginals(model, scheme);
    auto fit = sparsest_fit(y);
    if (fit.status != FitStatus::Recovered) continue;
    auto back = exact_marginals(*fit.model, scheme);
    for (std::size_t t = 0; t < y.values.size(); ++t)
      CHECK(std::abs(back.values[t] - y.values[t]) <= 1e-9);
  }
}

TEST_CASE("phase diagram: easy regimes recover, impossible ones do not") {
  auto ranking = recovery_phase_diagram(cb::core::SchemeKind::Ranking, {10}, {5},
                                        30, 2024);
  REQUIRE(ranking.size() == 1);
  CHECK(ranking[0].recovered >= 27);  // >= 90% in the Theorem regime

  auto topset =
      recovery_phase_diagram(cb::core::SchemeKind::TopSet, {40}, {2}, 20, 77);
  CHECK(topset[0].recovered >= 18);

  // K = N!: the signature rows run out by pigeonhole
  auto hopeless =
      recovery_phase_diagram(cb::core::SchemeKind::Comparison, {3}, {6}, 20, 5);
  CHECK(hopeless[0].recovered <= 5);
}

TEST_CASE("sparsify: deterministic model is returned exactly") {
  SparseChoiceModel det({{RankList::from_order({2, 1, 0, 3}), 1.0}}, 4);
  cb::rng::Engine eng(9);
  auto out = sparsify(det, 0.05, 2, PriceVector::unit(4), eng);
  CHECK(same_model(out, det, 0.0));
}

TEST_CASE("sparsify sample size follows the bound arithmetic") {
  auto m1 = sparsify_sample_size(7, 0.1, 3, 1.0);
  auto m2 = sparsify_sample_size(7, 0.05, 3, 1.0);
  CHECK(std::llabs(static_cast<long long>(m2) - 4LL * static_cast<long long>(m1)) <=
        3);
  CHECK(m1 == 13734);  // ceil(1800 * (log 6 + 3 log 7))
}

TEST_CASE("sparsify meets the revenue-error guarantee at desk scale") {
  cb::rng::Engine eng(31337);
  auto model = generate_random_model({40, 1.0, 2.0, 555}, 7);
  PriceVector unit = PriceVector::unit(7);
  auto hat = sparsify(model, 0.1, 3, unit, eng);
  CHECK(hat.support_size() <= sparsify_sample_size(7, 0.1, 3, 1.0));
  double total = 0;
  for (const auto& a : hat.support()) {
    total += a.prob;
    bool in_model = false;
    for (const auto& b : model.support())
      if (b.sigma == a.sigma) in_model = true;
    CHECK(in_model);  // never invents rank lists outside the sampled set
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);

  // exhaustive sweep over assortments with at most 2 products (|M| <= 3)
  double worst = 0.0;
  for (int i = 1; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      Assortment m(i == j ? std::vector<int>{i} : std::vector<int>{i, j});
      worst = std::max(worst, std::abs(revenue(model, m, unit) -
                                       revenue(hat, m, unit)));
    }
  CHECK(worst <= 0.1);
}

TEST_CASE("BFS sparsity audit") {
  // deterministic data: both supports are 1
  SparseChoiceModel det({{RankList::from_order({1, 0, 2, 3, 4}), 1.0}}, 5);
  auto y = exact_marginals(det, ObservationScheme::ranking(5));
  auto audit = bfs_sparsity_audit(y, Assortment({1, 2}), PriceVector::unit(5));
  CHECK(audit.bfs_support == 1);
  REQUIRE(audit.sparse_support.has_value());
  CHECK(*audit.sparse_support == 1);
  CHECK(audit.bfs_bound_ok);

  // K=2 instances: the decomposition polytope's vertices keep the gap in
  // {0,1} without exception; the BFS bound holds regardless of K
  for (int seed = 0; seed < 15; ++seed) {
    auto model = generate_random_model(
        {2, 1.0, 2.0, static_cast<std::uint64_t>(2000 + seed)}, 5);
    auto yr = exact_marginals(model, ObservationScheme::ranking(5));
    auto a = bfs_sparsity_audit(yr, Assortment({1, 3}), PriceVector::unit(5));
    CHECK(a.bfs_bound_ok);
    REQUIRE(a.gap.has_value());
    CHECK(*a.gap >= 0);
    CHECK(*a.gap <= 1);
  }

  // at K=3 the data sits on a lower-dimensional face and the almost-sure
  // statement starts to fray; the gap still lands in {0,1} most of the time
  int in_range = 0, audited = 0;
  for (int seed = 0; seed < 20; ++seed) {
    auto model = generate_random_model(
        {3, 1.0, 2.0, static_cast<std::uint64_t>(3000 + seed)}, 5);
    auto yr = exact_marginals(model, ObservationScheme::ranking(5));
    auto a = bfs_sparsity_audit(yr, Assortment({1, 3}), PriceVector::unit(5));
    CHECK(a.bfs_bound_ok);
    if (a.gap.has_value()) {
      ++audited;
      if (*a.gap >= 0 && *a.gap <= 1) ++in_range;
    }
  }
  CHECK(audited >= 15);
  CHECK(in_range * 10 >= audited * 6);
}
