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

#include <cmath>

#include "choicebound/error.hpp"
#include "choicebound/rng.hpp"
#include "doctest.h"

using namespace cb::lp;

namespace {

// Explicit dual of min/max c'x s.t. rows, x >= 0. Used to cross-check both
// the optimal value and the reported duals of the primal solve.
LpProblem explicit_dual(const LpProblem& p) {
  LpProblem d;
  d.sense = p.sense == Sense::Minimize ? Sense::Maximize : Sense::Minimize;
  for (const auto& row : p.rows) {
    double lb = -kInf, ub = kInf;
    bool flip = p.sense == Sense::Maximize;
    Relation rel = row.rel;
    if (rel == Relation::GreaterEqual) (flip ? ub : lb) = 0.0;
    if (rel == Relation::LessEqual) (flip ? lb : ub) = 0.0;
    d.add_variable(row.rhs, lb, ub);
  }
  for (int j = 0; j < p.num_vars(); ++j) {
    std::vector<std::pair<int, double>> coeffs;
    for (int i = 0; i < static_cast<int>(p.rows.size()); ++i)
      for (auto [v, c] : p.rows[i].coeffs)
        if (v == j) coeffs.push_back({i, c});
    d.add_row(p.sense == Sense::Minimize ? Relation::LessEqual : Relation::GreaterEqual,
              p.objective[j], std::move(coeffs));
  }
  return d;
}

}  // namespace

TEST_CASE("min x subject to x >= 3") {
  LpProblem p;
  int x = p.add_variable(1.0);
  p.add_row(Relation::GreaterEqual, 3.0, {{x, 1.0}});
  auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.x[x] == doctest::Approx(3.0));
  CHECK(s.duals[0] == doctest::Approx(1.0));  // min, >= row: dual >= 0
}

TEST_CASE("zero objective over x + y = 1") {
  LpProblem p;
  int x = p.add_variable(0.0), y = p.add_variable(0.0);
  p.add_row(Relation::Equal, 1.0, {{x, 1.0}, {y, 1.0}});
  auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(0.0));
  CHECK(s.x[x] + s.x[y] == doctest::Approx(1.0));
  CHECK(s.duals.size() == 1);
  CHECK(std::isfinite(s.duals[0]));
}

TEST_CASE("max x + y subject to x <= 1, y <= 2") {
  LpProblem p;
  p.sense = Sense::Maximize;
  int x = p.add_variable(1.0), y = p.add_variable(1.0);
  p.add_row(Relation::LessEqual, 1.0, {{x, 1.0}});
  p.add_row(Relation::LessEqual, 2.0, {{y, 1.0}});
  auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.duals[0] == doctest::Approx(1.0));
  CHECK(s.duals[1] == doctest::Approx(1.0));
}

TEST_CASE("free variables and finite bounds") {
  LpProblem p;
  int a = p.add_variable(2.0, -kInf, kInf);
  p.add_row(Relation::GreaterEqual, -5.0, {{a, 1.0}});
  auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(-10.0));

  LpProblem q;
  q.sense = Sense::Maximize;
  q.add_variable(1.0, 0.0, 4.0);
  auto t = solve(q);
  REQUIRE(t.status == Status::Optimal);
  CHECK(t.objective == doctest::Approx(4.0));

  LpProblem r;
  r.add_variable(1.0, -kInf, -2.0);  // only an upper bound
  auto u = solve(r);
  REQUIRE(u.status == Status::Unbounded);
}

TEST_CASE("infeasible and unbounded statuses") {
  LpProblem p;
  int x = p.add_variable(0.0);
  p.add_row(Relation::LessEqual, -1.0, {{x, 1.0}});
  auto s = solve(p);
  CHECK(s.status == Status::Infeasible);
  CHECK(s.infeasibility > 1e-7);

  LpProblem q;
  q.add_variable(-1.0);
  auto t = solve(q);
  CHECK(t.status == Status::Unbounded);
}

TEST_CASE("Beale's cycling example terminates at the optimum") {
  LpProblem p;
  int x1 = p.add_variable(-0.75), x2 = p.add_variable(150.0);
  int x3 = p.add_variable(-0.02), x4 = p.add_variable(6.0);
  p.add_row(Relation::LessEqual, 0.0,
            {{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}});
  p.add_row(Relation::LessEqual, 0.0,
            {{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}});
  p.add_row(Relation::LessEqual, 1.0, {{x3, 1.0}});
  auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(-0.05));
}

TEST_CASE("random LPs satisfy strong duality against the explicit dual") {
  cb::rng::Engine eng(42);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(cb::rng::below(eng, 5));
    const int m = 1 + static_cast<int>(cb::rng::below(eng, 5));
    LpProblem p;
    p.sense = cb::rng::uniform01(eng) < 0.5 ? Sense::Minimize : Sense::Maximize;
    std::vector<double> x0(n);
    for (int j = 0; j < n; ++j) {
      p.add_variable(cb::rng::uniform(eng, -1.0, 1.0));
      x0[j] = cb::rng::uniform(eng, 0.1, 2.0);
    }
    double sum0 = 0;
    for (int j = 0; j < n; ++j) sum0 += x0[j];
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> coeffs;
      double lhs = 0;
      for (int j = 0; j < n; ++j) {
        double c = cb::rng::uniform(eng, -2.0, 2.0);
        coeffs.push_back({j, c});
        lhs += c * x0[j];
      }
      double roll = cb::rng::uniform01(eng);
      if (roll < 0.4)
        p.add_row(Relation::LessEqual, lhs + cb::rng::uniform(eng, 0.1, 1.0), coeffs);
      else if (roll < 0.8)
        p.add_row(Relation::GreaterEqual, lhs - cb::rng::uniform(eng, 0.1, 1.0), coeffs);
      else
        p.add_row(Relation::Equal, lhs, coeffs);
    }
    {  // keep the problem bounded in every direction
      std::vector<std::pair<int, double>> coeffs;
      for (int j = 0; j < n; ++j) coeffs.push_back({j, 1.0});
      p.add_row(Relation::LessEqual, sum0 + 10.0, coeffs);
    }

    auto sp = solve(p);
    REQUIRE(sp.status == Status::Optimal);
    auto sd = solve(explicit_dual(p));
    REQUIRE(sd.status == Status::Optimal);
    CHECK(std::abs(sp.objective - sd.objective) <= 1e-6);

    // Reported duals reproduce the optimal value (all lower bounds are 0).
    double by = 0;
    for (std::size_t i = 0; i < p.rows.size(); ++i) by += sp.duals[i] * p.rows[i].rhs;
    CHECK(std::abs(by - sp.objective) <= 1e-6);
    ++solved;
  }
  CHECK(solved == 60);
}

TEST_CASE("textual dump mentions every row") {
  LpProblem p;
  int x = p.add_variable(1.0);
  p.add_row(Relation::GreaterEqual, 3.0, {{x, 1.0}});
  auto text = p.to_text();
  CHECK(text.find(">=") != std::string::npos);
  CHECK(text.find("minimize") != std::string::npos);
}
