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

#include <cmath>

#include "doctest.h"

using namespace cb::models;
using cb::core::Assortment;
using cb::core::PriceVector;
using cb::core::RankList;

TEST_CASE("mnl_prob closed form") {
  MnlModel equal({1, 1, 1});
  CHECK(mnl_prob(equal, 1, Assortment({1, 2})) == doctest::Approx(1.0 / 3));
  double e = std::exp(1.0);
  MnlModel logistic({1, e, e});
  CHECK(mnl_prob(logistic, 1, Assortment({1})) == doctest::Approx(e / (1 + e)));
  CHECK_THROWS_AS(mnl_prob(equal, 2, Assortment({1})), cb::Error);
}

TEST_CASE("preset table reproduces the published mean utilities") {
  const AmznTable& t = amzn_table();
  REQUIRE(t.products.size() == 15);
  for (const auto& p : t.products) {
    double u = t.theta[0] + t.theta[1] * p.price_per_disc + t.theta[2] * p.votes;
    CHECK(std::abs(u - p.mean_utility) <= 1e-3);
  }
  // product 12 specifically
  const auto& p12 = t.products[11];
  double u12 = t.theta[0] + t.theta[1] * p12.price_per_disc + t.theta[2] * p12.votes;
  CHECK(u12 == doctest::Approx(-3.589).epsilon(1e-3));
  CHECK(amzn_mnl().weights[12] == doctest::Approx(std::exp(u12)));
  CHECK(amzn_prices().prices()[12] == doctest::Approx(45.45));
}

TEST_CASE("MNL satisfies IIA exactly") {
  MnlModel m({1, 0.7, 2.3, 0.4, 1.9});
  Assortment small({1, 2});
  Assortment big({1, 2, 3, 4});
  double r1 = mnl_prob(m, 1, small) / mnl_prob(m, 2, small);
  double r2 = mnl_prob(m, 1, big) / mnl_prob(m, 2, big);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-14));
}

TEST_CASE("single-nest NL degenerates to MNL") {
  std::vector<double> w{1, 0.5, 2.0, 1.5};
  NestedLogitModel nl(w, {{1, 2, 3}}, 0.5, {1.0});
  MnlModel mnl(w);
  for (auto members : {std::vector<int>{1}, {2, 3}, {1, 2, 3}}) {
    Assortment m(members);
    for (int j : m)
      CHECK(nl_prob(nl, j, m) == doctest::Approx(mnl_prob(mnl, j, m)).epsilon(1e-12));
  }
}

TEST_CASE("preset CNL structure") {
  auto cnl = amzn_cnl();
  CHECK(cnl.rho == 0.5);
  REQUIRE(cnl.nests.size() == 4);
  CHECK(cnl.nests[0] == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(cnl.nests[3] == std::vector<int>{14, 15});
  double norm = 0;
  for (double a : cnl.alpha) {
    CHECK(a == doctest::Approx(1.0 / 16));
    norm += std::pow(a, cnl.rho);
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetric nests give symmetric probabilities") {
  NestedLogitModel nl({1, 2, 2}, {{1}, {2}}, 0.5,
                      {std::pow(0.5, 2.0), std::pow(0.5, 2.0)});
  Assortment m({1, 2});
  CHECK(nl_prob(nl, 1, m) == doctest::Approx(nl_prob(nl, 2, m)));
  double total = 0;
  for (int j : m) total += nl_prob(nl, j, m);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("NL violates IIA across nests") {
  // adding a product to 1's nest shifts P(1)/P(3) while MNL would not move
  NestedLogitModel nl({1, 1.0, 2.0, 1.5}, {{1, 2}, {3}}, 0.5,
                      {std::pow(0.5, 2.0), std::pow(0.5, 2.0)});
  Assortment without2({1, 3});
  Assortment with2({1, 2, 3});
  double r1 = nl_prob(nl, 1, without2) / nl_prob(nl, 3, without2);
  double r2 = nl_prob(nl, 1, with2) / nl_prob(nl, 3, with2);
  CHECK(std::abs(r1 - r2) > 1e-3);
}

TEST_CASE("NL choice probabilities sum to one") {
  auto cnl = amzn_cnl(8);
  for (auto members : {std::vector<int>{1, 3, 5}, {2, 4, 6, 7}, {1}}) {
    Assortment m(members);
    double total = 0;
    for (int j : m) total += nl_prob(cnl, j, m);
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("MMNL with zero variance equals MNL") {
  std::vector<std::vector<double>> x{{1.0, 2.0}, {0.5, -1.0}, {2.0, 0.3}};
  std::vector<double> theta{0.4, -0.7};
  MmnlModel mm(x, theta, {0.0, 0.0}, 0.0);
  std::vector<double> w{1, 0, 0, 0};
  for (int j = 1; j <= 3; ++j)
    w[j] = std::exp(theta[0] * x[j - 1][0] + theta[1] * x[j - 1][1]);
  MnlModel mnl(w);
  Assortment m({1, 2, 3});
  for (int j : m)
    CHECK(mmnl_prob(mm, j, m) == doctest::Approx(mnl_prob(mnl, j, m)).epsilon(1e-12));
}

TEST_CASE("MMNL with tiny variance converges to MNL") {
  MmnlIntegration integ;
  integ.seed = 99;
  std::vector<std::vector<double>> x{{1.0}, {0.5}, {-0.4}};
  MmnlModel mm(x, {0.8}, {0.0}, 1e-8, integ);  // 1-d mixing: Gauss-Hermite
  MnlModel mnl({1, std::exp(0.8), std::exp(0.4), std::exp(-0.32)});
  Assortment m({1, 2, 3});
  for (int j : m)
    CHECK(std::abs(mmnl_prob(mm, j, m) - mnl_prob(mnl, j, m)) <= 1e-6);
}

TEST_CASE("exchangeable products have equal MMNL probabilities") {
  MmnlIntegration integ;
  integ.samples = 20000;
  integ.seed = 7;
  std::vector<std::vector<double>> x{{1.0, 0.4}, {1.0, 0.4}};
  MmnlModel mm(x, {0.6, -0.2}, {0.1, -0.3}, 0.25, integ);
  Assortment m({1, 2});
  CHECK(mmnl_prob(mm, 1, m) == doctest::Approx(mmnl_prob(mm, 2, m)).epsilon(1e-12));
  double total = 0;
  for (int j : m) total += mmnl_prob(mm, j, m);
  CHECK(std::abs(total - 1.0) <= 1e-6);
}

TEST_CASE("Gauss-Hermite agrees with Monte Carlo on 1-d mixing") {
  std::vector<std::vector<double>> x{{1.2}, {-0.5}};
  MmnlIntegration gh;
  gh.method = MmnlIntegration::Method::GaussHermite;
  MmnlModel a(x, {0.9}, {0.2}, 0.3, gh);
  MmnlIntegration mc;
  mc.method = MmnlIntegration::Method::MonteCarlo;
  mc.samples = 200000;
  mc.seed = 5;
  MmnlModel b(x, {0.9}, {0.2}, 0.3, mc);
  Assortment m({1, 2});
  CHECK(std::abs(mmnl_prob(a, 1, m) - mmnl_prob(b, 1, m)) < 5e-3);
}

TEST_CASE("preset MMNL reproduces the published perturbation") {
  auto mm = amzn_mmnl(6);
  CHECK(mm.eta_sd() == 0.25);
  CHECK(mm.theta() == std::vector<double>{-4.31, -0.038, 3.54e-05});
  CHECK(mm.features().size() == 5);
  Assortment m({1, 2, 3});
  double total = 0;
  for (int j : m) total += mmnl_prob(mm, j, m);
  CHECK(std::abs(total - 1.0) <= 1e-6);
}

TEST_CASE("rank distribution of an MNL matches its choice probabilities") {
  MnlModel even({1, 1});
  auto d = to_rank_distribution(even);
  for (const auto& a : d.support()) CHECK(a.prob == doctest::Approx(0.5));

  MnlModel skew({1, 2});
  auto d2 = to_rank_distribution(skew);
  double first = 0;
  for (const auto& a : d2.support())
    if (a.sigma.rank_of(1) == 1) first += a.prob;
  CHECK(first == doctest::Approx(2.0 / 3));

  cb::rng::Engine eng(3);
  auto w = std::vector<double>{1.0};
  for (int j = 1; j < 4; ++j) w.push_back(std::exp(cb::rng::uniform(eng, -1, 1)));
  MnlModel m4(w);
  auto full = to_rank_distribution(m4);
  // every assortment, every member: induced probability equals the closed form
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<int> members;
    for (int j = 1; j < 4; ++j)
      if (mask & (1 << (j - 1))) members.push_back(j);
    Assortment m(members);
    for (int j : m)
      CHECK(std::abs(cb::core::choice_prob(full, j, m) - mnl_prob(m4, j, m)) <=
            1e-12);
  }
}

TEST_CASE("pairwise censored marginals from closed forms") {
  MnlModel uniform({1, 1, 1});
  auto y = simulate_pairwise_marginals(ChoiceModel(uniform));
  const auto& rows = y.scheme.row_index();
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].a == 1 && rows[t].b == 2) CHECK(y.values[t] == doctest::Approx(1.0 / 3));
    if (rows[t].a == 0 && rows[t].b == 1) CHECK(y.values[t] == doctest::Approx(0.5));
  }

  MnlModel dominant({1, 1e6, 1});
  auto yd = simulate_pairwise_marginals(ChoiceModel(dominant));
  for (std::size_t t = 0; t < rows.size(); ++t)
    if (rows[t].a == 1 && rows[t].b == 2) CHECK(yd.values[t] > 1.0 - 1e-5);

  // spot-check the preset against an inline evaluation of the closed form
  auto amzn = amzn_mnl();
  auto ya = simulate_pairwise_marginals(ChoiceModel(amzn));
  const auto& rows16 = ya.scheme.row_index();
  for (std::size_t t = 0; t < rows16.size(); ++t) {
    int i = rows16[t].a, j = rows16[t].b;
    double expect;
    if (i == 0)
      expect = 1.0 / (1.0 + amzn.weights[j]);
    else if (j == 0)
      expect = amzn.weights[i] / (1.0 + amzn.weights[i]);
    else
      expect = amzn.weights[i] / (1.0 + amzn.weights[i] + amzn.weights[j]);
    CHECK(ya.values[t] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("transaction simulation") {
  MnlModel uniform({1, 1, 1});
  std::vector<Assortment> shelves{Assortment({1, 2})};

  cb::rng::Engine eng(1);
  auto zero = simulate_transactions(ChoiceModel(uniform), shelves, {0}, eng);
  CHECK(zero.counts[0] == std::vector<long long>{0, 0, 0});

  auto det = cb::core::SparseChoiceModel({{RankList::from_order({1, 2, 0}), 1.0}}, 3);
  auto all1 = simulate_transactions(ChoiceModel(det), shelves, {1000}, eng);
  CHECK(all1.counts[0] == std::vector<long long>{0, 1000, 0});

  auto big = simulate_transactions(ChoiceModel(uniform), shelves, {100000}, eng);
  // 3-sigma CLT band around 1/3
  double sigma = std::sqrt(100000 * (1.0 / 3) * (2.0 / 3));
  for (long long c : big.counts[0])
    CHECK(std::abs(c - 100000.0 / 3) <= 3 * sigma);
}

TEST_CASE("generative model determinism and bounds") {
  GenerativeSpec spec{1, 1.0, 2.0, 42};
  auto single = generate_random_model(spec, 5);
  CHECK(single.support_size() == 1);
  CHECK(single.support()[0].prob == 1.0);

  GenerativeSpec spec5{5, 1.0, 2.0, 123};
  auto m1 = generate_random_model(spec5, 10);
  auto m2 = generate_random_model(spec5, 10);
  REQUIRE(m1.support_size() == m2.support_size());
  for (std::size_t i = 0; i < m1.support_size(); ++i) {
    CHECK(m1.support()[i].sigma == m2.support()[i].sigma);
    CHECK(m1.support()[i].prob == m2.support()[i].prob);
  }
  for (const auto& a : m1.support()) {
    CHECK(a.prob >= 0.1 - 1e-12);
    CHECK(a.prob <= 0.4 + 1e-12);
  }
}

TEST_CASE("fit_mnl recovers a generating MNL") {
  cb::rng::Engine eng(17);
  MnlModel truth({1, std::exp(0.7), std::exp(-0.4), std::exp(1.1)});
  std::vector<Assortment> shelves{Assortment({1, 2}), Assortment({2, 3}),
                                  Assortment({1, 3}), Assortment({1, 2, 3})};
  std::vector<long long> arrivals(shelves.size(), 1000000);
  auto counts = simulate_transactions(ChoiceModel(truth), shelves, arrivals, eng);
  auto fit = fit_mnl(counts);
  CHECK(fit.converged);
  CHECK(fit.pinned.empty());
  for (const auto& m : shelves)
    for (int j : m) {
      double got = mnl_prob(fit.model, j, m);
      double want = mnl_prob(truth, j, m);
      CHECK(std::abs(got - want) / want <= 0.02);
    }
}

TEST_CASE("fit_mnl flags separation and unseen products") {
  TransactionCounts data;
  data.num_products = 3;
  data.assortments = {Assortment({1, 2})};
  data.counts = {{0, 500, 0}};  // product 1 always chosen, 2 never, 0 never
  auto fit = fit_mnl(data);
  CHECK(!fit.clamped.empty());

  TransactionCounts data2;
  data2.num_products = 4;
  data2.assortments = {Assortment({1})};
  data2.counts = {{10, 20}};
  auto fit2 = fit_mnl(data2);
  // products 2 and 3 never appear
  CHECK(fit2.pinned == std::vector<int>{2, 3});
  CHECK(fit2.model.weights[2] <= std::exp(-29));
}

TEST_CASE("fit_mnl symmetric data gives symmetric weights") {
  TransactionCounts data;
  data.num_products = 3;
  data.assortments = {Assortment({1, 2})};
  data.counts = {{100, 250, 250}};
  auto fit = fit_mnl(data);
  CHECK(fit.converged);
  CHECK(fit.model.weights[1] == doctest::Approx(fit.model.weights[2]).epsilon(1e-6));
}
