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

#include "choicebound/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "choicebound/lp.hpp"

namespace cb::robust {

using core::Assortment;
using core::DataVector;
using core::ObservationScheme;
using core::RankList;
using core::SchemeKind;
using core::SparseChoiceModel;

namespace {

// Slack band applied to every equality data row so that marginals assembled
// in floating point stay feasible.
constexpr double kDataBand = 1e-9;
constexpr double kIntegralTol = 1e-7;

lp::Sense to_lp(Sense s) {
  return s == Sense::Min ? lp::Sense::Minimize : lp::Sense::Maximize;
}

std::optional<SparseChoiceModel> witness_from(const std::vector<RankList>& lists,
                                              const std::vector<double>& x, int n) {
  std::vector<SparseChoiceModel::Atom> atoms;
  double total = 0.0;
  for (std::size_t s = 0; s < lists.size(); ++s) {
    if (x[s] > 1e-9) {
      atoms.push_back({lists[s], x[s]});
      total += x[s];
    }
  }
  if (atoms.empty() || total <= 0.0) return std::nullopt;
  for (auto& a : atoms) a.prob /= total;
  double drift = 0.0;
  for (const auto& a : atoms) drift += a.prob;
  atoms.back().prob += 1.0 - drift;
  return SparseChoiceModel(std::move(atoms), n);
}

}  // namespace

RobustResult robust_bruteforce(const RobustQuery& q) {
  const int n = q.data.scheme.num_products();
  require(n <= core::kMaxEnumerableN, ErrorCode::TooLarge,
          "brute force enumerates N! columns; needs N <= 8");
  require(q.prices.num_products() == n, ErrorCode::Dimension,
          "price vector dimension mismatch");
  if (q.mode == ConstraintMode::Interval)
    require(q.data.intervals.has_value(), ErrorCode::InvalidArgument,
            "interval mode needs interval-valued data");

  std::vector<RankList> lists;
  std::vector<std::vector<std::uint8_t>> cols;
  lp::LpProblem p;
  p.sense = to_lp(q.sense);
  core::for_each_rank_list(n, [&](const RankList& sigma) {
    lists.push_back(sigma);
    cols.push_back(a_column(sigma, q.data.scheme));
    p.add_variable(q.prices[core::purchased_product(sigma, q.target)]);
  });

  const std::size_t m = q.data.scheme.rows();
  for (std::size_t t = 0; t < m; ++t) {
    std::vector<std::pair<int, double>> coeffs;
    for (std::size_t s = 0; s < lists.size(); ++s)
      if (cols[s][t]) coeffs.push_back({static_cast<int>(s), 1.0});
    // No slack band here: the phase-1 feasibility tolerance already absorbs
    // floating-point noise in y, and keeping the rows exact preserves the
    // m+1 support bound of a basic feasible witness.
    switch (q.mode) {
      case ConstraintMode::Equality:
        p.add_row(lp::Relation::Equal, q.data.values[t], coeffs);
        break;
      case ConstraintMode::AtLeast:
        p.add_row(lp::Relation::GreaterEqual, q.data.values[t], coeffs);
        break;
      case ConstraintMode::Interval: {
        const core::Interval& iv = (*q.data.intervals)[t];
        if (iv.lo > 0.0) p.add_row(lp::Relation::GreaterEqual, iv.lo, coeffs);
        if (iv.hi < 1.0) p.add_row(lp::Relation::LessEqual, iv.hi, coeffs);
        break;
      }
    }
  }
  {
    std::vector<std::pair<int, double>> ones;
    for (std::size_t s = 0; s < lists.size(); ++s)
      ones.push_back({static_cast<int>(s), 1.0});
    p.add_row(lp::Relation::Equal, 1.0, ones);
  }

  lp::LpSolution sol = lp::solve(p);
  RobustResult result;
  result.method = "brute";
  if (sol.status == lp::Status::Infeasible) {
    result.status = BoundStatus::Infeasible;
    result.bound = std::numeric_limits<double>::quiet_NaN();
    result.log = "no choice model is consistent with the data";
    return result;
  }
  require(sol.status == lp::Status::Optimal, ErrorCode::Numerical,
          "primal enumeration LP cannot be unbounded");
  result.bound = sol.objective;
  result.witness = witness_from(lists, sol.x, n);
  result.certified_exact = true;
  return result;
}

RobustResult robust_sampled_dual(const RobustQuery& q,
                                 std::span<const RankList> samples) {
  require(q.sense == Sense::Min, ErrorCode::InvalidArgument,
          "the sampled dual bounds the minimization problem");
  require(q.mode == ConstraintMode::Equality, ErrorCode::InvalidArgument,
          "the sampled dual works on point data");
  const int n = q.data.scheme.num_products();
  require(q.prices.num_products() == n, ErrorCode::Dimension,
          "price vector dimension mismatch");

  std::set<std::vector<int>> unique;
  std::vector<const RankList*> kept;
  for (const RankList& s : samples) {
    require(s.num_products() == n, ErrorCode::Dimension,
            "sampled rank list dimension mismatch");
    if (unique.insert(s.ranks()).second) kept.push_back(&s);
  }

  const std::size_t m = q.data.scheme.rows();
  lp::LpProblem p;
  p.sense = lp::Sense::Maximize;
  std::vector<int> ucol(m), vcol(m);
  for (std::size_t t = 0; t < m; ++t) {
    ucol[t] = p.add_variable(q.data.values[t] - kDataBand);
    vcol[t] = p.add_variable(-(q.data.values[t] + kDataBand));
  }
  const int nu = p.add_variable(1.0, -lp::kInf, lp::kInf);
  for (const RankList* s : kept) {
    auto col = a_column(*s, q.data.scheme);
    std::vector<std::pair<int, double>> coeffs;
    for (std::size_t t = 0; t < m; ++t)
      if (col[t]) {
        coeffs.push_back({ucol[t], 1.0});
        coeffs.push_back({vcol[t], -1.0});
      }
    coeffs.push_back({nu, 1.0});
    p.add_row(lp::Relation::LessEqual,
              q.prices[core::purchased_product(*s, q.target)], coeffs);
  }

  lp::LpSolution sol = lp::solve(p);
  RobustResult result;
  result.method = "sampled";
  if (sol.status == lp::Status::Unbounded) {
    result.status = BoundStatus::Unbounded;
    result.bound = std::numeric_limits<double>::infinity();
    result.log = "sampled dual is unbounded: too few sampled constraints; "
                 "raise n_samples";
    return result;
  }
  require(sol.status == lp::Status::Optimal, ErrorCode::Numerical,
          "sampled dual cannot be infeasible");
  result.bound = sol.objective;
  DualCertificate cert;
  cert.alpha.resize(m);
  for (std::size_t t = 0; t < m; ++t) cert.alpha[t] = sol.x[ucol[t]] - sol.x[vcol[t]];
  cert.nu = sol.x[nu];
  result.certificate = std::move(cert);
  std::ostringstream os;
  os << "unique sampled rank lists: " << kept.size();
  result.log = os.str();
  return result;
}

RobustResult robust_sampled_dual(const RobustQuery& q, int n_samples,
                                 rng::Engine& eng) {
  const int n = q.data.scheme.num_products();
  std::vector<RankList> samples;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  samples.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    rng::shuffle(eng, order);
    samples.push_back(RankList::from_order(order));
  }
  return robust_sampled_dual(q, samples);
}

// ---------------------------------------------------------------------------
// Canonical-representation machinery: every estimator below describes, for
// each purchased product j (and partition cell d), a polytope whose integer
// points are exactly the scheme columns of the rank lists in S_{jd}(M). The
// dual of "max alpha^T x over the cell" turns the robust dual into one LP.
// ---------------------------------------------------------------------------

namespace {

struct CellRow {
  std::vector<std::pair<int, double>> coeffs;  // over universe variables
  lp::Relation rel;                            // LessEqual or Equal
  double rhs;
};

struct Cell {
  int j = 0;                    // product purchased by this cell's rank lists
  std::vector<CellRow> rows;
  std::vector<std::int8_t> fixed;  // per universe var: -1 free, else 0/1
};

struct SchemeUniverse {
  int num_vars = 0;
  std::vector<int> data_var;  // data row t -> universe variable
  std::vector<Cell> cells;
};

int pair_var(int n, int i, int k) {  // lexicographic index of ordered pair
  return i * (n - 1) + (k - (k > i ? 1 : 0));
}

// Transitive-tournament description shared by the comparison-family schemes:
// x_ik + x_kl - x_il <= 1, x_ik + x_ki = 1, with x_ji = 1 pinned for every
// other member of the target assortment.
void add_comparison_base(Cell& cell, int n, const Assortment& target) {
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      for (int l = 0; l < n; ++l) {
        if (l == i || l == k) continue;
        cell.rows.push_back({{{pair_var(n, i, k), 1.0},
                              {pair_var(n, k, l), 1.0},
                              {pair_var(n, i, l), -1.0}},
                             lp::Relation::LessEqual,
                             1.0});
      }
      if (i < k)
        cell.rows.push_back({{{pair_var(n, i, k), 1.0}, {pair_var(n, k, i), 1.0}},
                             lp::Relation::Equal,
                             1.0});
    }
  for (int i : target) {
    if (i == cell.j) continue;
    cell.fixed[pair_var(n, cell.j, i)] = 1;
    cell.fixed[pair_var(n, i, cell.j)] = 0;
  }
}

SchemeUniverse make_ranking_universe(int n, const Assortment& target) {
  SchemeUniverse u;
  u.num_vars = n * n;
  auto var = [n](int r, int i) { return (r - 1) * n + i; };
  u.data_var.resize(n * n);
  for (int t = 0; t < n * n; ++t) u.data_var[t] = t;  // rows are (r,i) lex

  // sigma(j) = d is impossible when fewer than d-1 products lie outside the
  // target; those cells are empty and add nothing.
  const int max_rank = n - target.size() + 1;
  for (int j : target) {
    for (int d = 1; d <= max_rank; ++d) {
      Cell cell;
      cell.j = j;
      cell.fixed.assign(u.num_vars, -1);
      for (int r = 1; r <= n; ++r) {
        CellRow row{{}, lp::Relation::Equal, 1.0};
        for (int i = 0; i < n; ++i) row.coeffs.push_back({var(r, i), 1.0});
        cell.rows.push_back(std::move(row));
      }
      for (int i = 0; i < n; ++i) {
        CellRow col{{}, lp::Relation::Equal, 1.0};
        for (int r = 1; r <= n; ++r) col.coeffs.push_back({var(r, i), 1.0});
        cell.rows.push_back(std::move(col));
      }
      cell.fixed[var(d, j)] = 1;
      for (int r = 1; r <= n; ++r)
        if (r != d) cell.fixed[var(r, j)] = 0;
      for (int i = 0; i < n; ++i)
        if (i != j) cell.fixed[var(d, i)] = 0;
      for (int i : target)
        if (i != j)
          for (int dp = 1; dp < d; ++dp) cell.fixed[var(dp, i)] = 0;
      u.cells.push_back(std::move(cell));
    }
  }
  return u;
}

SchemeUniverse make_comparison_universe(int n, const Assortment& target) {
  SchemeUniverse u;
  u.num_vars = n * (n - 1);
  u.data_var.resize(u.num_vars);
  for (int t = 0; t < u.num_vars; ++t) u.data_var[t] = t;
  for (int j : target) {
    Cell cell;
    cell.j = j;
    cell.fixed.assign(u.num_vars, -1);
    add_comparison_base(cell, n, target);
    u.cells.push_back(std::move(cell));
  }
  return u;
}

SchemeUniverse make_top_set_universe(int n, const Assortment& target) {
  SchemeUniverse u;
  const int npairs = n * (n - 1);
  u.num_vars = npairs + n;
  u.data_var.resize(npairs + n);
  for (int t = 0; t < npairs; ++t) u.data_var[t] = t;
  for (int i = 0; i < n; ++i) u.data_var[npairs + i] = npairs + i;
  for (int j : target) {
    Cell cell;
    cell.j = j;
    cell.fixed.assign(u.num_vars, -1);
    add_comparison_base(cell, n, target);
    // t_i = AND of "i beats k" over k != i
    CellRow sum{{}, lp::Relation::Equal, 1.0};
    for (int i = 0; i < n; ++i) {
      const int ti = npairs + i;
      sum.coeffs.push_back({ti, 1.0});
      CellRow lower{{{ti, -1.0}}, lp::Relation::LessEqual,
                    static_cast<double>(n - 2)};
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        cell.rows.push_back(
            {{{ti, 1.0}, {pair_var(n, i, k), -1.0}}, lp::Relation::LessEqual, 0.0});
        lower.coeffs.push_back({pair_var(n, i, k), 1.0});
      }
      cell.rows.push_back(std::move(lower));
    }
    cell.rows.push_back(std::move(sum));
    u.cells.push_back(std::move(cell));
  }
  return u;
}

SchemeUniverse make_transaction_universe(int n, const Assortment& target,
                                         const std::vector<Assortment>& shelves) {
  SchemeUniverse u;
  const int npairs = n * (n - 1);
  int next = npairs;
  std::vector<std::vector<int>> sale_var(shelves.size());
  for (std::size_t a = 0; a < shelves.size(); ++a)
    for (int k = 0; k < shelves[a].size(); ++k) sale_var[a].push_back(next++);
  u.num_vars = next;
  for (std::size_t a = 0; a < shelves.size(); ++a)
    for (int k = 0; k < shelves[a].size(); ++k)
      u.data_var.push_back(sale_var[a][k]);

  for (int j : target) {
    Cell cell;
    cell.j = j;
    cell.fixed.assign(u.num_vars, -1);
    add_comparison_base(cell, n, target);
    for (std::size_t a = 0; a < shelves.size(); ++a) {
      const auto& members = shelves[a].members();
      CellRow sum{{}, lp::Relation::Equal, 1.0};
      for (std::size_t k = 0; k < members.size(); ++k) {
        const int s = sale_var[a][k];
        sum.coeffs.push_back({s, 1.0});
        CellRow lower{{{s, -1.0}}, lp::Relation::LessEqual,
                      static_cast<double>(members.size()) - 2.0};
        for (int other : members) {
          if (other == members[k]) continue;
          cell.rows.push_back({{{s, 1.0}, {pair_var(n, members[k], other), -1.0}},
                               lp::Relation::LessEqual,
                               0.0});
          lower.coeffs.push_back({pair_var(n, members[k], other), 1.0});
        }
        cell.rows.push_back(std::move(lower));
      }
      cell.rows.push_back(std::move(sum));
    }
    u.cells.push_back(std::move(cell));
  }
  return u;
}

// Censored scheme: row (i,k) with i,k != 0 observes z_ik = x_ik AND x_i0;
// rows (0,k) and (i,0) observe the plain preference bits. one_sided keeps
// only the z <= x halves (valid when alpha >= 0, as in the A lambda >= y
// relaxation); the cutting plane needs the exact two-sided description.
SchemeUniverse make_censored_universe(int n, const Assortment& target,
                                      bool one_sided) {
  SchemeUniverse u;
  const int npairs = n * (n - 1);
  int next = npairs;
  std::map<std::pair<int, int>, int> zvar;
  for (int i = 1; i < n; ++i)
    for (int k = 1; k < n; ++k)
      if (i != k) zvar[{i, k}] = next++;
  u.num_vars = next;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      if (i != 0 && k != 0)
        u.data_var.push_back(zvar[{i, k}]);
      else
        u.data_var.push_back(pair_var(n, i, k));
    }

  for (int j : target) {
    Cell cell;
    cell.j = j;
    cell.fixed.assign(u.num_vars, -1);
    add_comparison_base(cell, n, target);
    for (const auto& [ik, z] : zvar) {
      const auto [i, k] = ik;
      cell.rows.push_back(
          {{{z, 1.0}, {pair_var(n, i, k), -1.0}}, lp::Relation::LessEqual, 0.0});
      cell.rows.push_back(
          {{{z, 1.0}, {pair_var(n, i, 0), -1.0}}, lp::Relation::LessEqual, 0.0});
      if (!one_sided)
        cell.rows.push_back({{{pair_var(n, i, k), 1.0},
                              {pair_var(n, i, 0), 1.0},
                              {z, -1.0}},
                             lp::Relation::LessEqual,
                             1.0});
    }
    u.cells.push_back(std::move(cell));
  }
  return u;
}

SchemeUniverse make_universe(const ObservationScheme& scheme, const Assortment& target,
                             bool censored_one_sided) {
  const int n = scheme.num_products();
  switch (scheme.kind()) {
    case SchemeKind::Ranking:
      return make_ranking_universe(n, target);
    case SchemeKind::Comparison:
      return make_comparison_universe(n, target);
    case SchemeKind::TopSet:
      return make_top_set_universe(n, target);
    case SchemeKind::Transaction:
      return make_transaction_universe(n, target, scheme.assortments());
    case SchemeKind::CensoredComparison:
      return make_censored_universe(n, target, censored_one_sided);
  }
  fail(ErrorCode::InvalidArgument, "unsupported scheme");
}

// Cell rows with the fixed variables substituted out. Empty optional means
// the substitution exposed an infeasible (empty) cell.
struct ReducedCell {
  std::vector<CellRow> rows;  // over free variables only
  std::vector<int> free_vars;
  std::vector<int> var_slot;  // universe var -> index into free_vars, or -1
};

std::optional<ReducedCell> reduce_cell(const Cell& cell, int num_vars) {
  ReducedCell red;
  red.var_slot.assign(num_vars, -1);
  for (int v = 0; v < num_vars; ++v)
    if (cell.fixed[v] < 0) {
      red.var_slot[v] = static_cast<int>(red.free_vars.size());
      red.free_vars.push_back(v);
    }
  for (const CellRow& row : cell.rows) {
    CellRow out{{}, row.rel, row.rhs};
    for (auto [v, c] : row.coeffs) {
      if (cell.fixed[v] >= 0)
        out.rhs -= c * cell.fixed[v];
      else
        out.coeffs.push_back({red.var_slot[v], c});
    }
    if (out.coeffs.empty()) {
      const bool ok = row.rel == lp::Relation::Equal ? std::abs(out.rhs) <= 1e-9
                                                     : out.rhs >= -1e-9;
      if (!ok) return std::nullopt;
      continue;
    }
    red.rows.push_back(std::move(out));
  }
  return red;
}

struct FinalLpOutcome {
  lp::Status status = lp::Status::Optimal;
  double bound = 0.0;
  std::vector<double> alpha;
  double nu = 0.0;
};

// The single LP equivalent to the robust dual over the given cell polytopes:
//   max alpha^T y + nu
//   s.t. for every cell: gamma >= 0 on <= rows,
//        rhs^T gamma + nu + sum_{pinned data coords} alpha_t <= p_j,
//        (coeffs^T gamma)_u >= alpha_t(u) for every free var u.
// Point data enters through the +-band split alpha = u - v; alpha_nonneg
// switches to the one-sided A lambda >= y dual.
FinalLpOutcome solve_final_lp(const SchemeUniverse& universe,
                              const std::vector<double>& y,
                              const std::vector<double>& cell_price,
                              bool alpha_nonneg) {
  const std::size_t m = y.size();
  lp::LpProblem p;
  p.sense = lp::Sense::Maximize;
  std::vector<int> ucol(m), vcol(m, -1);
  for (std::size_t t = 0; t < m; ++t) {
    ucol[t] = p.add_variable(y[t] - kDataBand);
    if (!alpha_nonneg) vcol[t] = p.add_variable(-(y[t] + kDataBand));
  }
  const int nu = p.add_variable(1.0, -lp::kInf, lp::kInf);

  // data rows indexed by universe variable (for the alpha terms)
  std::vector<std::vector<int>> rows_of_var(universe.num_vars);
  for (std::size_t t = 0; t < m; ++t)
    rows_of_var[universe.data_var[t]].push_back(static_cast<int>(t));

  for (std::size_t c = 0; c < universe.cells.size(); ++c) {
    const Cell& cell = universe.cells[c];
    auto red = reduce_cell(cell, universe.num_vars);
    if (!red) continue;  // empty cell: its dual constraint is vacuous

    std::vector<int> gamma(red->rows.size());
    std::vector<std::pair<int, double>> budget;
    for (std::size_t r = 0; r < red->rows.size(); ++r) {
      const bool ineq = red->rows[r].rel == lp::Relation::LessEqual;
      gamma[r] = p.add_variable(0.0, ineq ? 0.0 : -lp::kInf, lp::kInf);
      if (red->rows[r].rhs != 0.0) budget.push_back({gamma[r], red->rows[r].rhs});
    }
    budget.push_back({nu, 1.0});
    double budget_rhs = cell_price[c];
    for (int v = 0; v < universe.num_vars; ++v) {
      if (cell.fixed[v] != 1) continue;
      for (int t : rows_of_var[v]) {
        budget.push_back({ucol[t], 1.0});
        if (vcol[t] >= 0) budget.push_back({vcol[t], -1.0});
      }
    }
    p.add_row(lp::Relation::LessEqual, budget_rhs, std::move(budget));

    // dual feasibility per free variable
    std::vector<std::vector<std::pair<int, double>>> per_var(red->free_vars.size());
    for (std::size_t r = 0; r < red->rows.size(); ++r)
      for (auto [slot, coeff] : red->rows[r].coeffs)
        per_var[slot].push_back({gamma[r], coeff});
    for (std::size_t slot = 0; slot < red->free_vars.size(); ++slot) {
      auto coeffs = per_var[slot];
      for (int t : rows_of_var[red->free_vars[slot]]) {
        coeffs.push_back({ucol[t], -1.0});
        if (vcol[t] >= 0) coeffs.push_back({vcol[t], 1.0});
      }
      p.add_row(lp::Relation::GreaterEqual, 0.0, std::move(coeffs));
    }
  }

  lp::LpSolution sol = lp::solve(p);
  FinalLpOutcome out;
  out.status = sol.status;
  if (sol.status != lp::Status::Optimal) return out;
  out.bound = sol.objective;
  out.alpha.resize(m);
  for (std::size_t t = 0; t < m; ++t)
    out.alpha[t] = sol.x[ucol[t]] - (vcol[t] >= 0 ? sol.x[vcol[t]] : 0.0);
  out.nu = sol.x[nu];
  return out;
}

struct SeparationResult {
  bool feasible = false;
  std::vector<double> values;  // per universe variable (fixed ones filled in)
  int fractional_var = -1;
  double fractional_score = 2.0;  // |value - 0.5|, lower is more fractional
};

SeparationResult separate_cell(const SchemeUniverse& universe, const Cell& cell,
                               const std::vector<double>& alpha) {
  SeparationResult out;
  auto red = reduce_cell(cell, universe.num_vars);
  if (!red) return out;

  std::vector<double> obj(red->free_vars.size(), 0.0);
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    int slot = red->var_slot[universe.data_var[t]];
    if (slot >= 0) obj[slot] += alpha[t];
  }
  lp::LpProblem p;
  p.sense = lp::Sense::Maximize;
  for (double c : obj) p.add_variable(c);
  for (const CellRow& row : red->rows) p.add_row(row.rel, row.rhs, row.coeffs);
  lp::LpSolution sol = lp::solve(p);
  if (sol.status == lp::Status::Infeasible) return out;
  require(sol.status == lp::Status::Optimal, ErrorCode::Numerical,
          "cell separation LP must be bounded");

  out.feasible = true;
  out.values.assign(universe.num_vars, 0.0);
  for (int v = 0; v < universe.num_vars; ++v)
    if (cell.fixed[v] >= 0) out.values[v] = cell.fixed[v];
  for (std::size_t slot = 0; slot < red->free_vars.size(); ++slot) {
    double val = sol.x[slot];
    out.values[red->free_vars[slot]] = val;
    if (std::abs(val - std::round(val)) > kIntegralTol) {
      double score = std::abs(val - 0.5);
      if (score < out.fractional_score) {
        out.fractional_score = score;
        out.fractional_var = red->free_vars[slot];
      }
    }
  }
  return out;
}

std::vector<double> effective_prices(const RobustQuery& q) {
  std::vector<double> p(q.prices.prices().begin(), q.prices.prices().end());
  if (q.sense == Sense::Max)
    for (double& v : p) v = -v;
  return p;
}

}  // namespace

RobustResult robust_ranking_exact(const RobustQuery& q) {
  require(q.data.scheme.kind() == SchemeKind::Ranking, ErrorCode::InvalidArgument,
          "robust_ranking_exact needs ranking data");
  require(q.mode == ConstraintMode::Equality, ErrorCode::InvalidArgument,
          "ranking dual works on point data");
  const int n = q.data.scheme.num_products();
  require(q.prices.num_products() == n, ErrorCode::Dimension,
          "price vector dimension mismatch");

  SchemeUniverse universe = make_universe(q.data.scheme, q.target, false);
  std::vector<double> prices = effective_prices(q);
  std::vector<double> cell_price;
  for (const Cell& cell : universe.cells) cell_price.push_back(prices[cell.j]);

  FinalLpOutcome out = solve_final_lp(universe, q.data.values, cell_price, false);
  RobustResult result;
  result.method = "ranking";
  if (out.status == lp::Status::Unbounded) {
    result.status = BoundStatus::Infeasible;
    result.bound = std::numeric_limits<double>::quiet_NaN();
    result.log = "dual unbounded: no choice model matches the ranking marginals";
    return result;
  }
  require(out.status == lp::Status::Optimal, ErrorCode::Numerical,
          "ranking dual LP must be optimal or unbounded");
  result.bound = q.sense == Sense::Max ? -out.bound : out.bound;
  result.certificate = DualCertificate{std::move(out.alpha), out.nu};
  if (q.sense == Sense::Max && result.certificate) {
    for (double& a : result.certificate->alpha) a = -a;
    result.certificate->nu = -result.certificate->nu;
  }
  result.certified_exact = true;  // assignment polytopes are integral
  return result;
}

RobustResult robust_cutting_plane(const RobustQuery& q, int max_rounds) {
  const SchemeKind kind = q.data.scheme.kind();
  require(kind == SchemeKind::Comparison || kind == SchemeKind::CensoredComparison ||
              kind == SchemeKind::TopSet || kind == SchemeKind::Transaction,
          ErrorCode::InvalidArgument,
          "cutting plane covers the comparison-family schemes");
  require(q.mode == ConstraintMode::Equality, ErrorCode::InvalidArgument,
          "cutting plane works on point data");
  require(max_rounds >= 1, ErrorCode::InvalidArgument, "need at least one round");
  const int n = q.data.scheme.num_products();
  require(q.prices.num_products() == n, ErrorCode::Dimension,
          "price vector dimension mismatch");

  SchemeUniverse universe = make_universe(q.data.scheme, q.target, false);
  std::vector<double> prices = effective_prices(q);

  RobustResult result;
  result.method = "cut";
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<double> cell_price;
    for (const Cell& cell : universe.cells) cell_price.push_back(prices[cell.j]);
    FinalLpOutcome out = solve_final_lp(universe, q.data.values, cell_price, false);
    if (out.status == lp::Status::Unbounded) {
      result.status = BoundStatus::Infeasible;
      result.bound = std::numeric_limits<double>::quiet_NaN();
      result.log = "relaxed dual unbounded: data inconsistent with any model";
      return result;
    }
    require(out.status == lp::Status::Optimal, ErrorCode::Numerical,
            "relaxed dual LP must be optimal or unbounded");
    result.round_bounds.push_back(q.sense == Sense::Max ? -out.bound : out.bound);
    result.bound = result.round_bounds.back();
    result.certificate = DualCertificate{out.alpha, out.nu};
    if (q.sense == Sense::Max && result.certificate) {
      for (double& a : result.certificate->alpha) a = -a;
      result.certificate->nu = -result.certificate->nu;
    }

    // Separation: find the most fractional coordinate over all cells.
    int best_cell = -1, best_var = -1;
    double best_score = 2.0;
    for (std::size_t c = 0; c < universe.cells.size(); ++c) {
      SeparationResult sep = separate_cell(universe, universe.cells[c], out.alpha);
      if (!sep.feasible || sep.fractional_var < 0) continue;
      if (sep.fractional_score < best_score) {
        best_score = sep.fractional_score;
        best_cell = static_cast<int>(c);
        best_var = sep.fractional_var;
      }
    }
    if (best_cell < 0) {
      result.certified_exact = true;
      result.status = BoundStatus::Optimal;
      return result;
    }
    if (round + 1 >= max_rounds) break;

    Cell zero = universe.cells[best_cell];
    zero.fixed[best_var] = 0;
    Cell one = std::move(universe.cells[best_cell]);
    one.fixed[best_var] = 1;
    universe.cells[best_cell] = std::move(zero);
    universe.cells.push_back(std::move(one));
  }
  result.status = BoundStatus::RoundLimit;
  result.log = "round limit reached; bound is a valid one-sided bound but not "
               "certified exact";
  return result;
}

RobustResult robust_censored_comparison(const RobustQuery& q) {
  require(q.data.scheme.kind() == SchemeKind::CensoredComparison,
          ErrorCode::InvalidArgument, "needs censored-comparison data");
  require(q.sense == Sense::Min, ErrorCode::InvalidArgument,
          "the censored relaxation bounds the minimization problem");
  require(q.mode == ConstraintMode::AtLeast, ErrorCode::InvalidArgument,
          "the censored relaxation uses A lambda >= y; set mode = AtLeast");
  const int n = q.data.scheme.num_products();
  require(q.prices.num_products() == n, ErrorCode::Dimension,
          "price vector dimension mismatch");

  SchemeUniverse universe = make_universe(q.data.scheme, q.target, true);
  std::vector<double> cell_price;
  for (const Cell& cell : universe.cells)
    cell_price.push_back(q.prices[cell.j]);
  FinalLpOutcome out = solve_final_lp(universe, q.data.values, cell_price, true);

  RobustResult result;
  result.method = "censored";
  if (out.status == lp::Status::Unbounded) {
    result.status = BoundStatus::Infeasible;
    result.bound = std::numeric_limits<double>::quiet_NaN();
    result.log = "dual unbounded: even A lambda >= y admits no choice model";
    return result;
  }
  require(out.status == lp::Status::Optimal, ErrorCode::Numerical,
          "censored dual LP must be optimal or unbounded");
  result.bound = out.bound;
  result.certificate = DualCertificate{std::move(out.alpha), out.nu};
  return result;
}

std::vector<IntervalBound> interval_bounds_from_counts(
    std::span<const SaleCount> counts, double z, long long min_count) {
  require(z >= 0.0, ErrorCode::InvalidArgument, "z must be nonnegative");
  std::vector<IntervalBound> out;
  for (const SaleCount& c : counts) {
    require(c.total >= c.count && c.count >= 0, ErrorCode::InvalidArgument,
            "bad sale count");
    if (c.count <= min_count) continue;  // discarded as too noisy
    const double yhat = static_cast<double>(c.count) / static_cast<double>(c.total);
    const double eps = std::sqrt((1.0 - yhat) / static_cast<double>(c.count));
    out.push_back({c.assortment, c.product, yhat * (1.0 - z * eps),
                   yhat * (1.0 + z * eps)});
  }
  return out;
}

RobustResult robust_conversion_interval(std::span<const IntervalBound> bounds,
                                        const Assortment& target, int n,
                                        Sense sense) {
  require(n <= core::kMaxEnumerableN, ErrorCode::TooLarge,
          "interval LP enumerates N! rank lists; needs N <= 8");

  std::vector<RankList> lists;
  lp::LpProblem p;
  p.sense = to_lp(sense);
  core::for_each_rank_list(n, [&](const RankList& sigma) {
    lists.push_back(sigma);
    p.add_variable(core::purchased_product(sigma, target) != 0 ? 1.0 : 0.0);
  });

  int active = 0;
  for (const IntervalBound& b : bounds) {
    require(b.lo <= b.hi, ErrorCode::InvalidArgument, "interval with lo > hi");
    std::vector<std::pair<int, double>> coeffs;
    for (std::size_t s = 0; s < lists.size(); ++s)
      if (core::purchased_product(lists[s], b.assortment) == b.product)
        coeffs.push_back({static_cast<int>(s), 1.0});
    // endpoints outside [0,1] make the corresponding side redundant
    bool used = false;
    if (b.lo > 0.0) {
      p.add_row(lp::Relation::GreaterEqual, b.lo, coeffs);
      used = true;
    }
    if (b.hi < 1.0) {
      p.add_row(lp::Relation::LessEqual, b.hi, coeffs);
      used = true;
    }
    if (used) ++active;
  }
  {
    std::vector<std::pair<int, double>> ones;
    for (std::size_t s = 0; s < lists.size(); ++s)
      ones.push_back({static_cast<int>(s), 1.0});
    p.add_row(lp::Relation::Equal, 1.0, ones);
  }

  lp::LpSolution sol = lp::solve(p);
  RobustResult result;
  result.method = "interval";
  if (sol.status == lp::Status::Infeasible) {
    result.status = BoundStatus::Infeasible;
    result.bound = std::numeric_limits<double>::quiet_NaN();
    result.log = "intervals admit no choice model; widen them (larger z), or "
                 "use find_min_feasible_z for the smallest feasible z";
    return result;
  }
  require(sol.status == lp::Status::Optimal, ErrorCode::Numerical,
          "interval LP cannot be unbounded");
  result.bound = sol.objective;
  result.witness = witness_from(lists, sol.x, n);
  std::ostringstream os;
  os << "active interval constraints: " << active;
  result.log = os.str();
  return result;
}

double find_min_feasible_z(std::span<const SaleCount> counts, int n, double tol,
                           long long min_count) {
  auto feasible = [&](double z) {
    auto bounds = interval_bounds_from_counts(counts, z, min_count);
    Assortment trivial(std::vector<int>{});
    RobustResult r = robust_conversion_interval(bounds, trivial, n, Sense::Min);
    return r.status == BoundStatus::Optimal;
  };
  double hi = 1.0;
  int doublings = 0;
  while (!feasible(hi)) {
    hi *= 2.0;
    require(++doublings <= 40, ErrorCode::Numerical,
            "no feasible z found; counts are mutually inconsistent");
  }
  double lo = 0.0;
  if (feasible(0.0)) return 0.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace cb::robust
