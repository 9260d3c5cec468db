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

#include "choicebound/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#ifndef NDEBUG
#include <unordered_set>
#endif

#include "choicebound/error.hpp"

namespace cb::lp {

int LpProblem::add_variable(double cost, double lb, double ub) {
  objective.push_back(cost);
  lower.push_back(lb);
  upper.push_back(ub);
  return static_cast<int>(objective.size()) - 1;
}

void LpProblem::add_row(Relation rel, double rhs,
                        std::vector<std::pair<int, double>> coeffs) {
  rows.push_back(Row{std::move(coeffs), rel, rhs});
}

std::string LpProblem::to_text() const {
  std::ostringstream os;
  os << (sense == Sense::Minimize ? "minimize" : "maximize");
  for (int j = 0; j < num_vars(); ++j)
    if (objective[j] != 0.0) os << " " << objective[j] << "*x" << j;
  os << "\nsubject to\n";
  for (const Row& r : rows) {
    bool first = true;
    for (auto [v, c] : r.coeffs) {
      os << (first ? "  " : " + ") << c << "*x" << v;
      first = false;
    }
    os << (r.rel == Relation::LessEqual ? " <= "
           : r.rel == Relation::Equal   ? " == "
                                        : " >= ")
       << r.rhs << "\n";
  }
  os << "bounds\n";
  for (int j = 0; j < num_vars(); ++j)
    os << "  " << lower[j] << " <= x" << j << " <= " << upper[j] << "\n";
  return os.str();
}

namespace {

// Standardized column derived from an original variable: x = shift + mult*x'.
struct VarCol {
  int var;      // original variable index, -1 for slack/artificial
  double mult;  // +1 or -1
  double shift;
};

struct Tableau {
  int m = 0;                     // active rows
  int ncols = 0;
  std::vector<double> a;         // row-major, m x ncols
  std::vector<double> b;         // rhs, >= 0 maintained by the ratio test
  std::vector<double> z;         // reduced costs
  std::vector<int> basis;        // basic column per row
  double obj = 0.0;              // c_B a_B^{-1} b for current phase costs

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * ncols + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * ncols + j];
  }
};

void recompute_reduced_costs(Tableau& t, const std::vector<double>& cost) {
  t.z.assign(t.ncols, 0.0);
  t.obj = 0.0;
  for (int j = 0; j < t.ncols; ++j) t.z[j] = cost[j];
  for (int i = 0; i < t.m; ++i) {
    double cb = cost[t.basis[i]];
    if (cb == 0.0) continue;
    const double* row = &t.a[static_cast<std::size_t>(i) * t.ncols];
    for (int j = 0; j < t.ncols; ++j) t.z[j] -= cb * row[j];
    t.obj += cb * t.b[i];
  }
}

void pivot(Tableau& t, int r, int jenter) {
  const std::size_t stride = t.ncols;
  double* prow = &t.a[static_cast<std::size_t>(r) * stride];
  const double piv = prow[jenter];
  const double inv = 1.0 / piv;
  for (int j = 0; j < t.ncols; ++j) prow[j] *= inv;
  prow[jenter] = 1.0;
  t.b[r] *= inv;
  for (int i = 0; i < t.m; ++i) {
    if (i == r) continue;
    double* row = &t.a[static_cast<std::size_t>(i) * stride];
    const double f = row[jenter];
    if (f == 0.0) continue;
    for (int j = 0; j < t.ncols; ++j) row[j] -= f * prow[j];
    row[jenter] = 0.0;
    t.b[i] -= f * t.b[r];
    if (t.b[i] < 0.0 && t.b[i] > -1e-11) t.b[i] = 0.0;
  }
  const double zf = t.z[jenter];
  if (zf != 0.0) {
    for (int j = 0; j < t.ncols; ++j) t.z[j] -= zf * prow[j];
    t.z[jenter] = 0.0;
    t.obj += zf * t.b[r];
  }
  t.basis[r] = jenter;
}

#ifndef NDEBUG
std::uint64_t basis_hash(const std::vector<int>& basis) {
  std::vector<int> s(basis);
  std::sort(s.begin(), s.end());
  std::uint64_t h = 1469598103934665603ULL;
  for (int v : s) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b9;
    h *= 1099511628211ULL;
  }
  return h;
}
#endif

enum class PhaseResult { OptimalPhase, UnboundedPhase };

// Bland's rule: enter the lowest-index improving column, leave by the minimum
// ratio with ties broken by the lowest basic variable index.
PhaseResult run_simplex(Tableau& t, const std::vector<double>& cost,
                        int first_barred_col, long long& iters,
                        long long max_iters) {
  recompute_reduced_costs(t, cost);
#ifndef NDEBUG
  std::unordered_set<std::uint64_t> seen;
  seen.insert(basis_hash(t.basis));
#endif
  long long since_refresh = 0;
  for (;;) {
    int jenter = -1;
    for (int j = 0; j < t.ncols; ++j) {
      if (j >= first_barred_col) break;
      if (t.z[j] < -kPivotTol) {
        jenter = j;
        break;
      }
    }
    if (jenter < 0) return PhaseResult::OptimalPhase;

    int r = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < t.m; ++i) {
      double aij = t.at(i, jenter);
      if (aij <= kPivotTol) continue;
      double ratio = t.b[i] / aij;
      if (r < 0 || ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 && t.basis[i] < t.basis[r])) {
        r = i;
        best_ratio = ratio;
      }
    }
    if (r < 0) return PhaseResult::UnboundedPhase;

    pivot(t, r, jenter);
    if (++iters > max_iters)
      fail(ErrorCode::Numerical,
           "simplex iteration limit reached (" + std::to_string(max_iters) + ")");
    if (++since_refresh >= 500) {
      recompute_reduced_costs(t, cost);
      since_refresh = 0;
    }
#ifndef NDEBUG
    if (!seen.insert(basis_hash(t.basis)).second && t.m < 64)
      fail(ErrorCode::Numerical, "simplex revisited a basis (cycling)");
#endif
  }
}

}  // namespace

LpSolution solve(const LpProblem& problem) {
  const int n = problem.num_vars();
  require(static_cast<int>(problem.lower.size()) == n &&
              static_cast<int>(problem.upper.size()) == n,
          ErrorCode::Dimension, "bound arrays must match variable count");
  for (const auto& row : problem.rows) {
    require(std::isfinite(row.rhs), ErrorCode::InvalidArgument,
            "row rhs must be finite");
    for (auto [v, c] : row.coeffs) {
      require(v >= 0 && v < n, ErrorCode::Dimension, "row references unknown variable");
      require(std::isfinite(c), ErrorCode::InvalidArgument,
              "row coefficient must be finite");
    }
  }

  const bool maximize = problem.sense == Sense::Maximize;

  // Columns: shift variables with finite lower bounds to 0, mirror variables
  // bounded only above, split free variables.
  std::vector<VarCol> cols;
  std::vector<int> first_col(n, -1);
  std::vector<char> is_split(n, 0);
  std::vector<std::pair<int, double>> ub_rows;  // (column, upper bound on x')
  double const_term = 0.0;
  for (int j = 0; j < n; ++j) {
    const double lb = problem.lower[j], ub = problem.upper[j];
    require(lb <= ub, ErrorCode::InvalidArgument, "lower bound exceeds upper bound");
    const double cj = maximize ? -problem.objective[j] : problem.objective[j];
    first_col[j] = static_cast<int>(cols.size());
    if (lb == -kInf && ub == kInf) {
      is_split[j] = 1;
      cols.push_back({j, 1.0, 0.0});
      cols.push_back({j, -1.0, 0.0});
    } else if (lb == -kInf) {
      cols.push_back({j, -1.0, ub});
      const_term += cj * ub;
    } else {
      require(lb != kInf, ErrorCode::InvalidArgument, "lower bound is +inf");
      cols.push_back({j, 1.0, lb});
      const_term += cj * lb;
      if (ub != kInf) ub_rows.push_back({first_col[j], ub - lb});
    }
  }
  const int nvar_cols = static_cast<int>(cols.size());

  const int m = static_cast<int>(problem.rows.size()) + static_cast<int>(ub_rows.size());
  int nslack = 0;
  for (const auto& row : problem.rows)
    if (row.rel != Relation::Equal) ++nslack;
  nslack += static_cast<int>(ub_rows.size());
  const int slack0 = nvar_cols;
  const int art0 = nvar_cols + nslack;
  const int ncols = art0 + m;

  Tableau t;
  t.m = m;
  t.ncols = ncols;
  t.a.assign(static_cast<std::size_t>(m) * ncols, 0.0);
  t.b.assign(m, 0.0);
  t.basis.resize(m);

  std::vector<double> row_sign(m, 1.0);
  int next_slack = slack0;
  int norig = static_cast<int>(problem.rows.size());
  for (int i = 0; i < m; ++i) {
    double rhs;
    if (i < norig) {
      const auto& row = problem.rows[i];
      rhs = row.rhs;
      for (auto [v, c] : row.coeffs) {
        t.at(i, first_col[v]) += c * cols[first_col[v]].mult;
        if (is_split[v]) t.at(i, first_col[v] + 1) += c * cols[first_col[v] + 1].mult;
        rhs -= c * cols[first_col[v]].shift;
      }
      if (row.rel == Relation::LessEqual) t.at(i, next_slack++) = 1.0;
      else if (row.rel == Relation::GreaterEqual) t.at(i, next_slack++) = -1.0;
    } else {
      const auto& [col, bound] = ub_rows[i - norig];
      t.at(i, col) = 1.0;
      t.at(i, next_slack++) = 1.0;
      rhs = bound;
    }
    if (rhs < 0.0) {
      row_sign[i] = -1.0;
      for (int j = 0; j < ncols; ++j) t.at(i, j) = -t.at(i, j);
      rhs = -rhs;
    }
    t.b[i] = rhs;
    t.at(i, art0 + i) = 1.0;
    t.basis[i] = art0 + i;
  }

  // Where each original row lives in the (possibly shrunk) tableau.
  std::vector<int> tab_of_row(m);
  std::vector<int> row_of_tab(m);
  for (int i = 0; i < m; ++i) tab_of_row[i] = row_of_tab[i] = i;

  const long long max_iters =
      std::min<long long>(500000, 10000 + 20LL * (m + ncols));
  long long iters = 0;

  // Phase 1: minimize the artificial mass.
  std::vector<double> c1(ncols, 0.0);
  for (int j = art0; j < ncols; ++j) c1[j] = 1.0;
  PhaseResult pr = run_simplex(t, c1, ncols, iters, max_iters);
  if (pr == PhaseResult::UnboundedPhase)
    fail(ErrorCode::Numerical, "phase-1 reported unbounded");
  recompute_reduced_costs(t, c1);

  LpSolution sol;
  sol.iterations = static_cast<int>(iters);
  if (t.obj > kFeasTol) {
    sol.status = Status::Infeasible;
    sol.infeasibility = t.obj;
    return sol;
  }

  // Drive leftover artificials out of the basis; a row with no eligible pivot
  // is linearly dependent and gets dropped (its dual is 0).
  for (int i = 0; i < t.m;) {
    if (t.basis[i] < art0) {
      ++i;
      continue;
    }
    if (t.b[i] <= kFeasTol) t.b[i] = 0.0;  // keep the pivot-out degenerate
    int jpiv = -1;
    for (int j = 0; j < art0; ++j)
      if (std::abs(t.at(i, j)) > 1e-7) {
        jpiv = j;
        break;
      }
    if (jpiv >= 0) {
      pivot(t, i, jpiv);
      ++i;
      continue;
    }
    // Redundant row: swap to the end and shrink.
    int last = t.m - 1;
    if (i != last) {
      for (int j = 0; j < t.ncols; ++j) std::swap(t.at(i, j), t.at(last, j));
      std::swap(t.b[i], t.b[last]);
      std::swap(t.basis[i], t.basis[last]);
      std::swap(row_of_tab[i], row_of_tab[last]);
      tab_of_row[row_of_tab[i]] = i;
    }
    tab_of_row[row_of_tab[last]] = -1;
    --t.m;
  }

  // Phase 2 on the real objective; artificial columns stay for dual
  // extraction but are barred from entering.
  std::vector<double> c2(ncols, 0.0);
  for (int jc = 0; jc < nvar_cols; ++jc) {
    double cj = problem.objective[cols[jc].var];
    if (maximize) cj = -cj;
    c2[jc] = cj * cols[jc].mult;
  }
  pr = run_simplex(t, c2, art0, iters, max_iters);
  sol.iterations = static_cast<int>(iters);
  if (pr == PhaseResult::UnboundedPhase) {
    sol.status = Status::Unbounded;
    return sol;
  }
  recompute_reduced_costs(t, c2);

  // Primal values.
  std::vector<double> xstd(ncols, 0.0);
  for (int i = 0; i < t.m; ++i) xstd[t.basis[i]] = t.b[i];
  sol.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const VarCol& c = cols[first_col[j]];
    sol.x[j] = c.shift + c.mult * xstd[first_col[j]];
    if (is_split[j]) sol.x[j] -= xstd[first_col[j] + 1];
  }
  sol.objective = t.obj + const_term;
  if (maximize) sol.objective = -sol.objective;

  // Row duals from the reduced costs of the initial identity columns.
  sol.duals.assign(norig, 0.0);
  for (int i = 0; i < norig; ++i) {
    if (tab_of_row[i] < 0) continue;  // dropped redundant row
    double y = -t.z[art0 + i];
    y *= row_sign[i];
    if (maximize) y = -y;
    sol.duals[i] = y;
  }

  sol.basis.assign(t.basis.begin(), t.basis.begin() + t.m);
  std::sort(sol.basis.begin(), sol.basis.end());

  // Residual audit against the original rows; a violation means the tableau
  // drifted and the result cannot be trusted.
  for (const auto& row : problem.rows) {
    double lhs = 0.0;
    for (auto [v, c] : row.coeffs) lhs += c * sol.x[v];
    double viol = 0.0;
    if (row.rel == Relation::LessEqual) viol = lhs - row.rhs;
    else if (row.rel == Relation::GreaterEqual) viol = row.rhs - lhs;
    else viol = std::abs(lhs - row.rhs);
    if (viol > 1e-6 * (1.0 + std::abs(row.rhs)))
      fail(ErrorCode::Numerical, "simplex produced an infeasible optimum");
  }

  sol.status = Status::Optimal;
  return sol;
}

}  // namespace cb::lp
