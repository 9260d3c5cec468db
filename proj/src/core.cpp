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

#include "choicebound/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace cb::core {

RankList::RankList(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  const int n = static_cast<int>(ranks_.size());
  require(n >= 2, ErrorCode::InvalidArgument, "rank list needs at least 2 products");
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  for (int r : ranks_) {
    require(r >= 1 && r <= n, ErrorCode::InvalidArgument,
            "rank out of range 1..N");
    require(!seen[r], ErrorCode::InvalidArgument, "duplicate rank (ties not allowed)");
    seen[r] = true;
  }
}

RankList RankList::from_order(const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  std::vector<int> ranks(n, 0);
  for (int pos = 0; pos < n; ++pos) {
    int product = order[pos];
    require(product >= 0 && product < n, ErrorCode::InvalidArgument,
            "product id out of range in order");
    ranks[product] = pos + 1;
  }
  return RankList(std::move(ranks));
}

std::vector<int> RankList::to_order() const {
  const int n = num_products();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[ranks_[i] - 1] = i;
  return order;
}

Assortment::Assortment(std::vector<int> members) : members_(std::move(members)) {
  for (int id : members_)
    require(id >= 0, ErrorCode::InvalidArgument, "negative product id");
  members_.push_back(0);
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool Assortment::contains(int product) const {
  return std::binary_search(members_.begin(), members_.end(), product);
}

int purchased_product(const RankList& sigma, const Assortment& m) {
  int best = -1;
  int best_rank = sigma.num_products() + 1;
  for (int j : m) {
    require(j < sigma.num_products(), ErrorCode::Dimension,
            "assortment member outside product universe");
    if (sigma.rank_of(j) < best_rank) {
      best_rank = sigma.rank_of(j);
      best = j;
    }
  }
  return best;
}

SparseChoiceModel::SparseChoiceModel(std::vector<Atom> support, int num_products)
    : support_(std::move(support)), num_products_(num_products) {
  require(num_products_ >= 2, ErrorCode::InvalidArgument, "need N >= 2");
  require(!support_.empty(), ErrorCode::InvalidArgument, "empty support");
  double total = 0.0;
  std::set<std::vector<int>> seen;
  for (const Atom& a : support_) {
    require(a.sigma.num_products() == num_products_, ErrorCode::Dimension,
            "rank list dimension mismatch");
    require(a.prob > 0.0, ErrorCode::InvalidArgument,
            "support probabilities must be strictly positive");
    require(seen.insert(a.sigma.ranks()).second, ErrorCode::InvalidArgument,
            "duplicate rank list in support");
    total += a.prob;
  }
  require(std::abs(total - 1.0) <= kProbSumTol, ErrorCode::InvalidArgument,
          "support probabilities must sum to 1 within 1e-12");
}

PriceVector::PriceVector(std::vector<double> prices) : prices_(std::move(prices)) {
  require(!prices_.empty(), ErrorCode::InvalidArgument, "empty price vector");
  require(prices_[0] == 0.0, ErrorCode::InvalidArgument,
          "price of the no-purchase option must be 0");
  for (double p : prices_)
    require(p >= 0.0 && std::isfinite(p), ErrorCode::InvalidArgument,
            "prices must be finite and nonnegative");
}

PriceVector PriceVector::unit(int num_products) {
  std::vector<double> p(num_products, 1.0);
  p[0] = 0.0;
  return PriceVector(std::move(p));
}

double PriceVector::max_price() const {
  return *std::max_element(prices_.begin(), prices_.end());
}

ObservationScheme::ObservationScheme(SchemeKind kind, int n,
                                     std::vector<Assortment> assortments)
    : kind_(kind), n_(n), assortments_(std::move(assortments)) {
  require(n_ >= 2, ErrorCode::InvalidArgument, "need N >= 2");
  switch (kind_) {
    case SchemeKind::Comparison:
    case SchemeKind::CensoredComparison:
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          if (i != j) rows_.push_back({i, j});
      break;
    case SchemeKind::Ranking:
      for (int r = 1; r <= n_; ++r)
        for (int i = 0; i < n_; ++i) rows_.push_back({r, i});
      break;
    case SchemeKind::TopSet:
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          if (i != j) rows_.push_back({i, j});
      for (int i = 0; i < n_; ++i) rows_.push_back({i, -1});
      break;
    case SchemeKind::Transaction:
      require(!assortments_.empty(), ErrorCode::InvalidArgument,
              "transaction scheme needs at least one assortment");
      for (std::size_t m = 0; m < assortments_.size(); ++m) {
        for (int i : assortments_[m]) {
          require(i < n_, ErrorCode::Dimension,
                  "assortment member outside product universe");
          rows_.push_back({static_cast<int>(m), i});
        }
      }
      break;
  }
}

ObservationScheme ObservationScheme::comparison(int n) {
  return ObservationScheme(SchemeKind::Comparison, n, {});
}
ObservationScheme ObservationScheme::ranking(int n) {
  return ObservationScheme(SchemeKind::Ranking, n, {});
}
ObservationScheme ObservationScheme::top_set(int n) {
  return ObservationScheme(SchemeKind::TopSet, n, {});
}
ObservationScheme ObservationScheme::censored_comparison(int n) {
  return ObservationScheme(SchemeKind::CensoredComparison, n, {});
}
ObservationScheme ObservationScheme::transaction(int n,
                                                 std::vector<Assortment> assortments) {
  return ObservationScheme(SchemeKind::Transaction, n, std::move(assortments));
}

std::string ObservationScheme::row_label(std::size_t t) const {
  require(t < rows_.size(), ErrorCode::InvalidArgument, "row index out of range");
  const SchemeRow& r = rows_[t];
  switch (kind_) {
    case SchemeKind::Comparison:
      return "pref(" + std::to_string(r.a) + "," + std::to_string(r.b) + ")";
    case SchemeKind::Ranking:
      return "rank(" + std::to_string(r.a) + "," + std::to_string(r.b) + ")";
    case SchemeKind::TopSet:
      if (r.b < 0) return "top(" + std::to_string(r.a) + ")";
      return "pref(" + std::to_string(r.a) + "," + std::to_string(r.b) + ")";
    case SchemeKind::CensoredComparison:
      return "buy(" + std::to_string(r.a) + "," + std::to_string(r.b) + ")";
    case SchemeKind::Transaction: {
      std::string s = "sale(" + std::to_string(r.b) + ",{";
      const Assortment& m = assortments_[r.a];
      for (int k = 0; k < m.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(m.members()[k]);
      }
      return s + "})";
    }
  }
  return {};
}

const char* scheme_kind_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Comparison: return "comparison";
    case SchemeKind::Ranking: return "ranking";
    case SchemeKind::TopSet: return "topset";
    case SchemeKind::Transaction: return "transaction";
    case SchemeKind::CensoredComparison: return "censored";
  }
  return "?";
}

SchemeKind scheme_kind_from_name(const std::string& name) {
  if (name == "comparison") return SchemeKind::Comparison;
  if (name == "ranking") return SchemeKind::Ranking;
  if (name == "topset") return SchemeKind::TopSet;
  if (name == "transaction") return SchemeKind::Transaction;
  if (name == "censored") return SchemeKind::CensoredComparison;
  fail(ErrorCode::InvalidArgument, "unknown scheme kind: " + name);
}

DataVector::DataVector(ObservationScheme s, std::vector<double> v,
                       std::optional<std::vector<Interval>> iv)
    : scheme(std::move(s)), values(std::move(v)), intervals(std::move(iv)) {
  require(values.size() == scheme.rows(), ErrorCode::Dimension,
          "data vector length must match scheme row count");
  for (double y : values)
    require(y >= -1e-9 && y <= 1.0 + 1e-9, ErrorCode::InvalidArgument,
            "point values must lie in [0,1]");
  if (intervals) {
    require(intervals->size() == scheme.rows(), ErrorCode::Dimension,
            "interval count must match scheme row count");
    for (const Interval& iv2 : *intervals)
      require(iv2.lo <= iv2.hi, ErrorCode::InvalidArgument,
              "interval with lo > hi");
  }
}

std::vector<std::uint8_t> a_column(const RankList& sigma,
                                   const ObservationScheme& scheme) {
  require(sigma.num_products() == scheme.num_products(), ErrorCode::Dimension,
          "rank list and scheme disagree on N");
  const auto& rows = scheme.row_index();
  std::vector<std::uint8_t> col(rows.size(), 0);
  switch (scheme.kind()) {
    case SchemeKind::Comparison:
      for (std::size_t t = 0; t < rows.size(); ++t)
        col[t] = sigma.prefers(rows[t].a, rows[t].b);
      break;
    case SchemeKind::Ranking:
      for (std::size_t t = 0; t < rows.size(); ++t)
        col[t] = sigma.rank_of(rows[t].b) == rows[t].a;
      break;
    case SchemeKind::TopSet:
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t].b < 0)
          col[t] = sigma.rank_of(rows[t].a) == 1;
        else
          col[t] = sigma.prefers(rows[t].a, rows[t].b);
      }
      break;
    case SchemeKind::CensoredComparison:
      for (std::size_t t = 0; t < rows.size(); ++t) {
        int i = rows[t].a, j = rows[t].b;
        if (i == 0)
          col[t] = sigma.prefers(0, j);
        else
          col[t] = sigma.prefers(i, j) && sigma.prefers(i, 0);
      }
      break;
    case SchemeKind::Transaction:
      for (std::size_t t = 0; t < rows.size(); ++t) {
        const Assortment& m = scheme.assortments()[rows[t].a];
        col[t] = purchased_product(sigma, m) == rows[t].b;
      }
      break;
  }
  return col;
}

double choice_prob(const SparseChoiceModel& model, int j, const Assortment& m) {
  require(m.contains(j), ErrorCode::InvalidArgument,
          "choice_prob: product not offered in the assortment");
  double p = 0.0;
  for (const auto& atom : model.support())
    if (purchased_product(atom.sigma, m) == j) p += atom.prob;
  return p;
}

double revenue(const SparseChoiceModel& model, const Assortment& m,
               const PriceVector& p) {
  require(p.num_products() == model.num_products(), ErrorCode::Dimension,
          "price vector dimension mismatch");
  double r = 0.0;
  for (const auto& atom : model.support())
    r += atom.prob * p[purchased_product(atom.sigma, m)];
  return r;
}

DataVector exact_marginals(const SparseChoiceModel& model,
                           const ObservationScheme& scheme) {
  require(model.num_products() == scheme.num_products(), ErrorCode::Dimension,
          "model and scheme disagree on N");
  std::vector<double> y(scheme.rows(), 0.0);
  for (const auto& atom : model.support()) {
    std::vector<std::uint8_t> col = a_column(atom.sigma, scheme);
    for (std::size_t t = 0; t < y.size(); ++t)
      if (col[t]) y[t] += atom.prob;
  }
  for (double& v : y) v = std::min(1.0, std::max(0.0, v));
  return DataVector(scheme, std::move(y));
}

void for_each_rank_list(int n, const std::function<void(const RankList&)>& fn) {
  require(n >= 2 && n <= kMaxEnumerableN, ErrorCode::TooLarge,
          "rank-list enumeration supported only for 2 <= N <= 8");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  do {
    fn(RankList::from_order(order));
  } while (std::next_permutation(order.begin(), order.end()));
}

}  // namespace cb::core
