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
// Domain types for rank-list choice models: products, preference lists,
// assortments, finitely supported distributions over rank lists, observation
// schemes with their implicit 0/1 column structure, and the revenue
// functional. Everything here is immutable after construction and safe to
// share between threads; all operations are pure.

#ifndef CHOICEBOUND_CORE_HPP_
#define CHOICEBOUND_CORE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "choicebound/error.hpp"

namespace cb::core {

// Product ids are 0..N-1; id 0 is always the no-purchase option.
// Ranks are 1-based: rank 1 is the most preferred position.

inline constexpr double kProbSumTol = 1e-12;
inline constexpr int kMaxEnumerableN = 8;  // N! enumeration guard

/// A strict total preference order over all N products. ranks()[i] is the
/// rank of product i; smaller rank = more preferred.
class RankList {
 public:
  explicit RankList(std::vector<int> ranks);

  /// Builds from a preference order: order[0] is the most preferred product.
  static RankList from_order(const std::vector<int>& order);

  int num_products() const { return static_cast<int>(ranks_.size()); }
  int rank_of(int product) const { return ranks_[product]; }
  const std::vector<int>& ranks() const { return ranks_; }

  /// Products sorted most-preferred first.
  std::vector<int> to_order() const;

  bool prefers(int i, int j) const { return ranks_[i] < ranks_[j]; }

  auto operator<=>(const RankList&) const = default;

 private:
  std::vector<int> ranks_;
};

/// An offer set. Always contains product 0 (no-purchase): the constructor
/// inserts it if missing. Members are kept sorted and unique.
class Assortment {
 public:
  Assortment() : members_{0} {}
  explicit Assortment(std::vector<int> members);

  const std::vector<int>& members() const { return members_; }
  bool contains(int product) const;
  int size() const { return static_cast<int>(members_.size()); }

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  auto operator<=>(const Assortment&) const = default;

 private:
  std::vector<int> members_;
};

/// Product the given customer type purchases from the assortment: the
/// best-ranked member.
int purchased_product(const RankList& sigma, const Assortment& m);

/// Finitely supported distribution over rank lists. Probabilities are
/// strictly positive, rank lists pairwise distinct, total mass 1 within
/// 1e-12.
class SparseChoiceModel {
 public:
  struct Atom {
    RankList sigma;
    double prob;
  };

  SparseChoiceModel(std::vector<Atom> support, int num_products);

  const std::vector<Atom>& support() const { return support_; }
  int num_products() const { return num_products_; }
  std::size_t support_size() const { return support_.size(); }

 private:
  std::vector<Atom> support_;
  int num_products_;
};

/// Nonnegative prices; prices()[0] is always 0.
class PriceVector {
 public:
  explicit PriceVector(std::vector<double> prices);
  static PriceVector unit(int num_products);  // conversion-rate prices

  const std::vector<double>& prices() const { return prices_; }
  double operator[](int product) const { return prices_[product]; }
  int num_products() const { return static_cast<int>(prices_.size()); }
  double max_price() const;

 private:
  std::vector<double> prices_;
};

enum class SchemeKind {
  Comparison,           // rows (i,j): fraction preferring i to j
  Ranking,              // rows (r,i): fraction ranking i at position r
  TopSet,               // comparison rows then first-choice rows
  Transaction,          // rows (m,i): sales share of i under assortment m
  CensoredComparison,   // rows (i,j): purchase share of i from {0,i,j}
};

/// One row of a scheme; the meaning of (a, b) depends on the kind:
///   Comparison / CensoredComparison: a = i, b = j
///   Ranking:      a = r (1-based rank), b = i
///   TopSet:       comparison block rows as above, top rows a = i, b = -1
///   Transaction:  a = assortment index, b = product id
struct SchemeRow {
  int a;
  int b;
};

/// Defines the implicit 0/1 matrix A: the column of a rank list under a
/// fixed, documented row ordering (lexicographic in the row index tuples).
class ObservationScheme {
 public:
  static ObservationScheme comparison(int n);
  static ObservationScheme ranking(int n);
  static ObservationScheme top_set(int n);
  static ObservationScheme censored_comparison(int n);
  static ObservationScheme transaction(int n, std::vector<Assortment> assortments);

  SchemeKind kind() const { return kind_; }
  int num_products() const { return n_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<SchemeRow>& row_index() const { return rows_; }
  const std::vector<Assortment>& assortments() const { return assortments_; }

  std::string row_label(std::size_t t) const;

  bool operator==(const ObservationScheme& o) const {
    return kind_ == o.kind_ && n_ == o.n_ && assortments_ == o.assortments_;
  }

 private:
  ObservationScheme(SchemeKind kind, int n, std::vector<Assortment> assortments);

  SchemeKind kind_;
  int n_;
  std::vector<Assortment> assortments_;  // Transaction only
  std::vector<SchemeRow> rows_;
};

const char* scheme_kind_name(SchemeKind kind);
SchemeKind scheme_kind_from_name(const std::string& name);

struct Interval {
  double lo;
  double hi;
};

/// The observed marginal vector y under a scheme, optionally interval-valued.
/// Interval endpoints may lie outside [0,1]; such bounds are one-sided or
/// redundant and are dropped by consumers.
struct DataVector {
  ObservationScheme scheme;
  std::vector<double> values;
  std::optional<std::vector<Interval>> intervals;

  DataVector(ObservationScheme s, std::vector<double> v,
             std::optional<std::vector<Interval>> iv = std::nullopt);
};

/// Column A(sigma) of the scheme's implicit matrix.
std::vector<std::uint8_t> a_column(const RankList& sigma,
                                   const ObservationScheme& scheme);

/// P(j | m) under the model; requires j in m. Sums to 1 over members.
double choice_prob(const SparseChoiceModel& model, int j, const Assortment& m);

/// R(m) = sum_{j in m} p_j P(j | m). Unit prices give the conversion rate.
double revenue(const SparseChoiceModel& model, const Assortment& m,
               const PriceVector& p);

/// y = A lambda, point form.
DataVector exact_marginals(const SparseChoiceModel& model,
                           const ObservationScheme& scheme);

/// Calls fn once per rank list of S_N in lexicographic order of the
/// preference order vector. Requires n <= 8.
void for_each_rank_list(int n, const std::function<void(const RankList&)>& fn);

}  // namespace cb::core

#endif  // CHOICEBOUND_CORE_HPP_
