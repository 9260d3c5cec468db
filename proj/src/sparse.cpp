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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "choicebound/models.hpp"
#include "choicebound/parallel.hpp"
#include "choicebound/robust.hpp"

namespace cb::sparse {

using core::Assortment;
using core::DataVector;
using core::ObservationScheme;
using core::RankList;
using core::SchemeKind;
using core::SparseChoiceModel;

namespace {

// Deterministic completion of a preference digraph: repeatedly emit the
// smallest-id source. Fails on cycles.
std::optional<RankList> topo_rank_list(const std::vector<std::vector<char>>& beats) {
  const int n = static_cast<int>(beats.size());
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (beats[i][j]) ++indeg[j];
  std::vector<char> done(n, 0);
  std::vector<int> order;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && indeg[i] == 0) {
        pick = i;
        break;
      }
    if (pick < 0) return std::nullopt;  // cycle
    done[pick] = 1;
    order.push_back(pick);
    for (int j = 0; j < n; ++j)
      if (beats[pick][j]) --indeg[j];
  }
  return RankList::from_order(order);
}

std::optional<RankList> decode_column(const ObservationScheme& scheme,
                                      const std::vector<std::uint8_t>& col) {
  const int n = scheme.num_products();
  const auto& rows = scheme.row_index();
  switch (scheme.kind()) {
    case SchemeKind::Ranking: {
      std::vector<int> ranks(n, 0);
      std::vector<char> rank_used(n + 1, 0);
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (!col[t]) continue;
        int r = rows[t].a, i = rows[t].b;
        if (ranks[i] != 0 || rank_used[r]) return std::nullopt;
        ranks[i] = r;
        rank_used[r] = 1;
      }
      for (int i = 0; i < n; ++i)
        if (ranks[i] == 0) return std::nullopt;
      return RankList(ranks);
    }
    case SchemeKind::Comparison:
    case SchemeKind::TopSet: {
      std::vector<std::vector<char>> beats(n, std::vector<char>(n, 0));
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t].b < 0) continue;  // first-choice rows checked by re-encoding
        if (col[t])
          beats[rows[t].a][rows[t].b] = 1;
        else
          beats[rows[t].b][rows[t].a] = 1;
      }
      return topo_rank_list(beats);
    }
    case SchemeKind::CensoredComparison: {
      std::vector<std::vector<char>> beats(n, std::vector<char>(n, 0));
      for (std::size_t t = 0; t < rows.size(); ++t) {
        int i = rows[t].a, j = rows[t].b;
        if (i == 0) {
          // the (0,j) rows are uncensored: either side is informative
          beats[col[t] ? 0 : j][col[t] ? j : 0] = 1;
        } else if (col[t]) {
          beats[i][j] = 1;
          beats[i][0] = 1;
        }
      }
      return topo_rank_list(beats);
    }
    case SchemeKind::Transaction: {
      std::vector<std::vector<char>> beats(n, std::vector<char>(n, 0));
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (!col[t]) continue;
        int i = rows[t].b;
        for (int other : scheme.assortments()[rows[t].a])
          if (other != i) beats[i][other] = 1;
      }
      return topo_rank_list(beats);
    }
  }
  return std::nullopt;
}

SparsestFitOutput violated(std::string reason, std::optional<std::size_t> row) {
  SparsestFitOutput out;
  out.status = FitStatus::ConditionViolated;
  out.reason = std::move(reason);
  out.offending_row = row;
  return out;
}

}  // namespace

SparsestFitOutput sparsest_fit(const DataVector& y, const SparsestFitOptions& opts) {
  require(!y.intervals.has_value(), ErrorCode::InvalidArgument,
          "sparsest_fit needs noiseless point data");
  const std::size_t m = y.values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return y.values[a] < y.values[b];
  });

  std::vector<double> mass;                          // per atom
  std::vector<std::vector<std::uint8_t>> bits;       // per atom, per row
  std::vector<std::size_t> creation_row;             // signature row d(i)
  // all subset sums of the masses found so far, with their atom masks
  std::vector<std::pair<double, std::uint32_t>> sums{{0.0, 0}};

  for (std::size_t d : order) {
    const double target = y.values[d];
    auto lo = std::lower_bound(sums.begin(), sums.end(), target - opts.tol,
                               [](const auto& s, double v) { return s.first < v; });
    auto hi = std::upper_bound(sums.begin(), sums.end(), target + opts.tol,
                               [](double v, const auto& s) { return v < s.first; });
    const std::ptrdiff_t matches = hi - lo;
    if (matches > 1)
      return violated("row value is an ambiguous subset sum of recovered masses", d);
    if (matches == 1) {
      const std::uint32_t mask = lo->second;
      for (std::size_t i = 0; i < mass.size(); ++i)
        if (mask & (1u << i)) bits[i][d] = 1;
      continue;
    }
    // new atom
    if (static_cast<int>(mass.size()) >= opts.max_support)
      return violated("support grew past the cap; data is not a small sparse mix", d);
    mass.push_back(target);
    bits.emplace_back(m, std::uint8_t{0});
    bits.back()[d] = 1;
    creation_row.push_back(d);
    std::vector<std::pair<double, std::uint32_t>> merged;
    merged.reserve(sums.size() * 2);
    const std::uint32_t newbit = 1u << (mass.size() - 1);
    std::vector<std::pair<double, std::uint32_t>> shifted(sums);
    for (auto& s : shifted) {
      s.first += target;
      s.second |= newbit;
    }
    std::merge(sums.begin(), sums.end(), shifted.begin(), shifted.end(),
               std::back_inserter(merged));
    sums = std::move(merged);
  }

  if (mass.empty()) return violated("all-zero data vector", std::nullopt);
  double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (std::abs(total - 1.0) > std::max(1e-9, opts.tol * mass.size()))
    return violated("recovered masses do not sum to 1", std::nullopt);

  std::vector<SparseChoiceModel::Atom> atoms;
  std::map<std::vector<int>, int> seen;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    auto sigma = decode_column(y.scheme, bits[i]);
    if (!sigma)
      return violated("recovered column does not decode to a rank list",
                      creation_row[i]);
    if (!seen.emplace(sigma->ranks(), static_cast<int>(i)).second)
      return violated("two recovered columns decode to the same rank list",
                      creation_row[i]);
    atoms.push_back({*sigma, mass[i] / total});
  }
  double drift = 0.0;
  for (const auto& a : atoms) drift += a.prob;
  atoms.back().prob += 1.0 - drift;
  SparseChoiceModel model(std::move(atoms), y.scheme.num_products());

  // Reconstruction identity: re-encoding must reproduce y within tolerance.
  DataVector back = core::exact_marginals(model, y.scheme);
  for (std::size_t t = 0; t < m; ++t)
    if (std::abs(back.values[t] - y.values[t]) > std::max(opts.tol, 1e-9))
      return violated("re-encoded marginals do not reproduce the data", t);

  SparsestFitOutput out;
  out.status = FitStatus::Recovered;
  out.model = std::move(model);
  out.signature_row = std::move(creation_row);
  return out;
}

SignatureReport check_signature(const SparseChoiceModel& model,
                                const ObservationScheme& scheme) {
  std::vector<std::vector<std::uint8_t>> cols;
  for (const auto& atom : model.support())
    cols.push_back(a_column(atom.sigma, scheme));
  SignatureReport report;
  report.witness_row.assign(model.support_size(), -1);
  report.ok = true;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t t = 0; t < scheme.rows(); ++t) {
      if (!cols[i][t]) continue;
      bool alone = true;
      for (std::size_t j = 0; j < cols.size() && alone; ++j)
        if (j != i && cols[j][t]) alone = false;
      if (alone) {
        report.witness_row[i] = static_cast<long long>(t);
        break;
      }
    }
    if (report.witness_row[i] < 0) report.ok = false;
  }
  return report;
}

IndependenceReport check_linear_independence(const SparseChoiceModel& model,
                                             int c_bound) {
  const int k = static_cast<int>(model.support_size());
  const int c = c_bound > 0 ? c_bound : k;
  require(c >= 1, ErrorCode::InvalidArgument, "need C >= 1");
  IndependenceReport report;
  report.bound_used = c;
  std::vector<double> lambda;
  for (const auto& atom : model.support()) lambda.push_back(atom.prob);
  constexpr double kZeroTol = 1e-9;
  const double radix = 2.0 * c + 1.0;

  const double direct_size = std::pow(radix, k);
  const int half = (k + 1) / 2;
  const double half_size = std::pow(radix, half);

  auto combo_of = [&](std::uint64_t code, int len, int offset,
                      std::vector<int>& out) {
    double s = 0.0;
    for (int i = 0; i < len; ++i) {
      int ci = static_cast<int>(code % static_cast<std::uint64_t>(radix)) - c;
      out[offset + i] = ci;
      s += ci * lambda[offset + i];
      code /= static_cast<std::uint64_t>(radix);
    }
    return s;
  };

  if (direct_size <= double(1 << 26)) {
    std::vector<int> combo(k, 0);
    const std::uint64_t count = static_cast<std::uint64_t>(direct_size);
    for (std::uint64_t code = 0; code < count; ++code) {
      double s = combo_of(code, k, 0, combo);
      bool zero = std::all_of(combo.begin(), combo.end(), [](int v) { return v == 0; });
      if (!zero && std::abs(s) <= kZeroTol) {
        report.status = IndependenceStatus::Violated;
        report.violating_c = combo;
        return report;
      }
    }
    report.status = IndependenceStatus::Satisfied;
    return report;
  }

  if (half_size <= double(1 << 22)) {
    // meet in the middle: left sums sorted, right sums searched
    const int left = half, right = k - half;
    std::vector<std::pair<double, std::uint64_t>> lsums;
    std::vector<int> combo(k, 0);
    const auto lcount = static_cast<std::uint64_t>(std::pow(radix, left));
    lsums.reserve(lcount);
    for (std::uint64_t code = 0; code < lcount; ++code)
      lsums.push_back({combo_of(code, left, 0, combo), code});
    std::sort(lsums.begin(), lsums.end());
    const auto rcount = static_cast<std::uint64_t>(std::pow(radix, right));
    for (std::uint64_t rc = 0; rc < rcount; ++rc) {
      double rs = combo_of(rc, right, left, combo);
      auto lo = std::lower_bound(
          lsums.begin(), lsums.end(), -rs - kZeroTol,
          [](const auto& s, double v) { return s.first < v; });
      for (auto it = lo; it != lsums.end() && it->first <= -rs + kZeroTol; ++it) {
        combo_of(it->second, left, 0, combo);
        bool zero =
            std::all_of(combo.begin(), combo.end(), [](int v) { return v == 0; });
        if (!zero) {
          report.status = IndependenceStatus::Violated;
          report.violating_c = combo;
          return report;
        }
      }
    }
    report.status = IndependenceStatus::Satisfied;
    return report;
  }

  // Too large for an exact search: randomized probing only.
  rng::Engine eng(0xC0FFEE ^ static_cast<std::uint64_t>(k));
  std::vector<int> combo(k, 0);
  for (int probe = 0; probe < 2000000; ++probe) {
    bool zero = true;
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      combo[i] = static_cast<int>(rng::below(eng, static_cast<std::uint64_t>(radix))) - c;
      if (combo[i] != 0) zero = false;
      s += combo[i] * lambda[i];
    }
    if (!zero && std::abs(s) <= kZeroTol) {
      report.status = IndependenceStatus::Violated;
      report.violating_c = combo;
      return report;
    }
  }
  report.status = IndependenceStatus::NotFalsified;
  return report;
}

std::vector<PhaseDiagramCell> recovery_phase_diagram(SchemeKind kind,
                                                     const std::vector<int>& n_values,
                                                     const std::vector<int>& k_values,
                                                     int trials, std::uint64_t seed) {
  require(kind != SchemeKind::Transaction, ErrorCode::InvalidArgument,
          "phase diagram runs on the assortment-free schemes");
  require(trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  std::vector<PhaseDiagramCell> cells;
  for (int n : n_values)
    for (int k : k_values) cells.push_back({n, k, trials, 0});

  parallel::for_each_index(cells.size(), [&](std::size_t ci) {
    PhaseDiagramCell& cell = cells[ci];
    ObservationScheme scheme = [&] {
      switch (kind) {
        case SchemeKind::Comparison:
          return ObservationScheme::comparison(cell.n);
        case SchemeKind::Ranking:
          return ObservationScheme::ranking(cell.n);
        case SchemeKind::TopSet:
          return ObservationScheme::top_set(cell.n);
        default:
          return ObservationScheme::censored_comparison(cell.n);
      }
    }();
    for (int trial = 0; trial < cell.trials; ++trial) {
      models::GenerativeSpec spec{cell.k, 1.0, 2.0,
                                  rng::derive_seed(seed, ci, trial)};
      SparseChoiceModel truth = models::generate_random_model(spec, cell.n);
      DataVector y = core::exact_marginals(truth, scheme);
      SparsestFitOutput fit = sparsest_fit(y);
      if (fit.status != FitStatus::Recovered) continue;
      if (fit.model->support_size() != truth.support_size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < truth.support_size() && same; ++i) {
        const auto& a = truth.support()[i];
        bool found = false;
        for (const auto& b : fit.model->support())
          if (b.sigma == a.sigma && std::abs(b.prob - a.prob) <= 1e-9) found = true;
        same = found;
      }
      if (same) ++cell.recovered;
    }
  });
  return cells;
}

std::size_t sparsify_sample_size(int n, double eps, int max_assortment,
                                 double max_price) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  require(max_assortment >= 1, ErrorCode::InvalidArgument, "need C >= 1");
  const double c = max_assortment;
  const double m = (2.0 * c * c * max_price * max_price / (eps * eps)) *
                   (std::log(2.0 * c) + c * std::log(static_cast<double>(n)));
  return static_cast<std::size_t>(std::ceil(m));
}

namespace {

SparseChoiceModel empirical_from_draws(const std::map<std::vector<int>, long long>& hits,
                                       std::size_t draws, int n) {
  std::vector<SparseChoiceModel::Atom> atoms;
  for (const auto& [ranks, count] : hits)
    atoms.push_back({RankList(ranks), static_cast<double>(count) / draws});
  double drift = 0.0;
  for (const auto& a : atoms) drift += a.prob;
  atoms.back().prob += 1.0 - drift;
  return SparseChoiceModel(std::move(atoms), n);
}

}  // namespace

SparseChoiceModel sparsify(const SparseChoiceModel& model, double eps,
                           int max_assortment, const core::PriceVector& prices,
                           rng::Engine& eng) {
  if (model.support_size() == 1) return model;  // empirical copy is exact
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& atom : model.support()) {
    acc += atom.prob;
    cdf.push_back(acc);
  }
  const std::size_t draws = sparsify_sample_size(model.num_products(), eps,
                                                 max_assortment, prices.max_price());
  std::map<std::vector<int>, long long> hits;
  for (std::size_t d = 0; d < draws; ++d) {
    double u = rng::uniform01(eng);
    std::size_t pick =
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (pick >= cdf.size()) pick = cdf.size() - 1;
    ++hits[model.support()[pick].sigma.ranks()];
  }
  return empirical_from_draws(hits, draws, model.num_products());
}

SparseChoiceModel sparsify(const std::function<RankList(rng::Engine&)>& sampler,
                           int n, double eps, int max_assortment,
                           const core::PriceVector& prices, rng::Engine& eng) {
  const std::size_t draws =
      sparsify_sample_size(n, eps, max_assortment, prices.max_price());
  std::map<std::vector<int>, long long> hits;
  for (std::size_t d = 0; d < draws; ++d) ++hits[sampler(eng).ranks()];
  return empirical_from_draws(hits, draws, n);
}

SparsityAudit bfs_sparsity_audit(const DataVector& y, const Assortment& target,
                                 const core::PriceVector& prices) {
  SparsityAudit audit;
  audit.rows = y.values.size();
  robust::RobustQuery q{y, target, prices, robust::Sense::Min,
                        robust::ConstraintMode::Equality};
  robust::RobustResult r = robust::robust_bruteforce(q);
  require(r.status == robust::BoundStatus::Optimal && r.witness.has_value(),
          ErrorCode::InvalidArgument,
          "sparsity audit needs data consistent with some model");
  audit.bfs_support = r.witness->support_size();
  audit.bfs_bound_ok = audit.bfs_support <= audit.rows + 1;

  SparsestFitOutput fit = sparsest_fit(y);
  if (fit.status == FitStatus::Recovered) {
    audit.sparse_support = fit.model->support_size();
    audit.gap = static_cast<long long>(audit.bfs_support) -
                static_cast<long long>(*audit.sparse_support);
  }
  return audit;
}

}  // namespace cb::sparse
