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
// Self-contained dense two-phase primal simplex with Bland's rule. Returns
// primal values, row duals, and the optimal basis. Sized for the problems in
// this project (a few hundred rows, up to a few tens of thousands of
// columns); no sparse factorization, no warm starts.

#ifndef CHOICEBOUND_LP_HPP_
#define CHOICEBOUND_LP_HPP_

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cb::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPivotTol = 1e-9;
inline constexpr double kFeasTol = 1e-7;

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

struct LpProblem {
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<double> lower;  // -inf allowed (free variable)
  std::vector<double> upper;  // +inf allowed; finite bounds become rows

  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;

  int add_variable(double cost, double lb = 0.0, double ub = kInf);
  void add_row(Relation rel, double rhs, std::vector<std::pair<int, double>> coeffs);
  int num_vars() const { return static_cast<int>(objective.size()); }

  /// Plain-text dump: one line per variable bound, one per row, readable
  /// relations. Debug aid only; not a stable format.
  std::string to_text() const;
};

/// Row duals follow the textbook convention for the problem as stated:
/// for Minimize, duals are >= 0 on GreaterEqual rows, <= 0 on LessEqual rows,
/// free on Equal rows, and satisfy c^T x = b^T y at the optimum when every
/// variable has lower bound 0 or is free. For Maximize the signs flip
/// (>= 0 on LessEqual rows).
struct LpSolution {
  Status status = Status::Optimal;
  std::vector<double> x;       // original variable values (Optimal only)
  double objective = 0.0;
  std::vector<double> duals;   // one per original row (Optimal only)
  std::vector<int> basis;      // basic column indices, standardized space
  double infeasibility = 0.0;  // phase-1 optimum when Infeasible
  int iterations = 0;
};

/// Two-phase solve. Throws cb::Error(Numerical) if the iteration cap is hit;
/// never returns a wrong "Optimal".
LpSolution solve(const LpProblem& problem);

}  // namespace cb::lp

#endif  // CHOICEBOUND_LP_HPP_
