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

#include "choicebound/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cb::io {

using nlohmann::json;

json model_to_json(const models::ChoiceModel& model) {
  struct Visitor {
    json operator()(const core::SparseChoiceModel& m) const {
      json support = json::array();
      for (const auto& atom : m.support())
        support.push_back({{"ranks", atom.sigma.ranks()}, {"prob", atom.prob}});
      return {{"type", "sparse"}, {"n", m.num_products()}, {"support", support}};
    }
    json operator()(const models::MnlModel& m) const {
      return {{"type", "mnl"}, {"weights", m.weights}};
    }
    json operator()(const models::NestedLogitModel& m) const {
      return {{"type", "nl"},
              {"weights", m.weights},
              {"nests", m.nests},
              {"rho", m.rho},
              {"alpha", m.alpha}};
    }
    json operator()(const models::MmnlModel& m) const {
      const auto& integ = m.integration();
      const char* method =
          integ.method == models::MmnlIntegration::Method::MonteCarlo  ? "mc"
          : integ.method == models::MmnlIntegration::Method::GaussHermite ? "gh"
                                                                          : "auto";
      return {{"type", "mmnl"},
              {"features", m.features()},
              {"theta", m.theta()},
              {"eta_mean", m.eta_mean()},
              {"eta_sd", m.eta_sd()},
              {"integration",
               {{"method", method},
                {"samples", integ.samples},
                {"gh_order", integ.gh_order},
                {"seed", integ.seed}}}};
    }
  };
  return std::visit(Visitor{}, model);
}

models::ChoiceModel model_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "sparse") {
      int n = j.at("n").get<int>();
      std::vector<core::SparseChoiceModel::Atom> atoms;
      for (const auto& a : j.at("support"))
        atoms.push_back({core::RankList(a.at("ranks").get<std::vector<int>>()),
                         a.at("prob").get<double>()});
      return core::SparseChoiceModel(std::move(atoms), n);
    }
    if (type == "mnl")
      return models::MnlModel(j.at("weights").get<std::vector<double>>());
    if (type == "nl")
      return models::NestedLogitModel(
          j.at("weights").get<std::vector<double>>(),
          j.at("nests").get<std::vector<std::vector<int>>>(),
          j.at("rho").get<double>(), j.at("alpha").get<std::vector<double>>());
    if (type == "mmnl") {
      models::MmnlIntegration integ;
      if (j.contains("integration")) {
        const json& ji = j.at("integration");
        std::string method = ji.value("method", "auto");
        integ.method = method == "mc" ? models::MmnlIntegration::Method::MonteCarlo
                       : method == "gh"
                           ? models::MmnlIntegration::Method::GaussHermite
                           : models::MmnlIntegration::Method::Auto;
        integ.samples = ji.value("samples", integ.samples);
        integ.gh_order = ji.value("gh_order", integ.gh_order);
        integ.seed = ji.value("seed", integ.seed);
      }
      return models::MmnlModel(
          j.at("features").get<std::vector<std::vector<double>>>(),
          j.at("theta").get<std::vector<double>>(),
          j.at("eta_mean").get<std::vector<double>>(), j.at("eta_sd").get<double>(),
          integ);
    }
    fail(ErrorCode::Parse, "unknown model type: " + type);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed model: ") + e.what());
  }
}

json scheme_to_json(const core::ObservationScheme& scheme) {
  json j{{"kind", core::scheme_kind_name(scheme.kind())},
         {"n", scheme.num_products()}};
  if (scheme.kind() == core::SchemeKind::Transaction) {
    json shelves = json::array();
    for (const auto& m : scheme.assortments()) shelves.push_back(m.members());
    j["assortments"] = shelves;
  }
  return j;
}

core::ObservationScheme scheme_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const int n = j.at("n").get<int>();
    switch (core::scheme_kind_from_name(kind)) {
      case core::SchemeKind::Comparison:
        return core::ObservationScheme::comparison(n);
      case core::SchemeKind::Ranking:
        return core::ObservationScheme::ranking(n);
      case core::SchemeKind::TopSet:
        return core::ObservationScheme::top_set(n);
      case core::SchemeKind::CensoredComparison:
        return core::ObservationScheme::censored_comparison(n);
      case core::SchemeKind::Transaction: {
        std::vector<core::Assortment> shelves;
        for (const auto& members : j.at("assortments"))
          shelves.push_back(core::Assortment(members.get<std::vector<int>>()));
        return core::ObservationScheme::transaction(n, std::move(shelves));
      }
    }
    fail(ErrorCode::Parse, "unknown scheme kind");
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed scheme: ") + e.what());
  }
}

json data_to_json(const core::DataVector& data) {
  json labels = json::array();
  for (std::size_t t = 0; t < data.scheme.rows(); ++t)
    labels.push_back(data.scheme.row_label(t));
  json j{{"scheme", scheme_to_json(data.scheme)},
         {"labels", labels},
         {"values", data.values}};
  if (data.intervals) {
    json ivs = json::array();
    for (const auto& iv : *data.intervals) ivs.push_back({iv.lo, iv.hi});
    j["intervals"] = ivs;
  }
  return j;
}

core::DataVector data_from_json(const json& j) {
  try {
    core::ObservationScheme scheme = scheme_from_json(j.at("scheme"));
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    std::optional<std::vector<core::Interval>> intervals;
    if (j.contains("intervals")) {
      std::vector<core::Interval> ivs;
      for (const auto& pair : j.at("intervals")) {
        require(pair.is_array() && pair.size() == 2, ErrorCode::Parse,
                "interval entries must be [lo, hi] pairs");
        ivs.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      intervals = std::move(ivs);
    }
    if (j.contains("labels")) {
      const auto labels = j.at("labels").get<std::vector<std::string>>();
      require(labels.size() == scheme.rows(), ErrorCode::Parse,
              "label count does not match the scheme");
      for (std::size_t t = 0; t < labels.size(); ++t)
        require(labels[t] == scheme.row_label(t), ErrorCode::Parse,
                "row label mismatch at index " + std::to_string(t) +
                    " (wrong row ordering?)");
    }
    return core::DataVector(std::move(scheme), std::move(values),
                            std::move(intervals));
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed data vector: ") + e.what());
  }
}

json prices_to_json(const core::PriceVector& prices) {
  return {{"prices", prices.prices()}};
}

core::PriceVector prices_from_json(const json& j) {
  try {
    return core::PriceVector(j.at("prices").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed prices: ") + e.what());
  }
}

json result_to_json(const robust::RobustResult& result) {
  const char* status = "optimal";
  switch (result.status) {
    case robust::BoundStatus::Optimal: break;
    case robust::BoundStatus::Infeasible: status = "infeasible"; break;
    case robust::BoundStatus::Unbounded: status = "unbounded"; break;
    case robust::BoundStatus::RoundLimit: status = "round_limit"; break;
  }
  json j{{"method", result.method},
         {"status", status},
         {"certified_exact", result.certified_exact}};
  if (std::isfinite(result.bound)) j["bound"] = result.bound;
  if (result.certificate)
    j["certificate"] = {{"alpha", result.certificate->alpha},
                        {"nu", result.certificate->nu}};
  if (!result.round_bounds.empty()) j["rounds"] = result.round_bounds;
  if (result.witness) {
    j["witness"] = model_to_json(models::ChoiceModel(*result.witness));
    j["witness_support"] = result.witness->support_size();
  }
  if (!result.log.empty()) j["log"] = result.log;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, "bad JSON in " + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_transactions_csv(const std::string& path,
                            const models::TransactionCounts& counts) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot write " + path);
  out << "assortment_id,product_id,count\n";
  for (std::size_t a = 0; a < counts.assortments.size(); ++a) {
    const auto& members = counts.assortments[a].members();
    for (std::size_t k = 0; k < members.size(); ++k)
      out << a << "," << members[k] << "," << counts.counts[a][k] << "\n";
  }
}

models::TransactionCounts read_transactions_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse,
          "empty transactions file");
  require(line == "assortment_id,product_id,count", ErrorCode::Parse,
          "transactions CSV must start with 'assortment_id,product_id,count'");
  std::map<long long, std::vector<std::pair<int, long long>>> grouped;
  int max_product = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    bool ok = static_cast<bool>(std::getline(row, a, ',')) &&
              static_cast<bool>(std::getline(row, b, ',')) &&
              static_cast<bool>(std::getline(row, c));
    require(ok, ErrorCode::Parse,
            "bad transactions row at line " + std::to_string(lineno));
    try {
      long long aid = std::stoll(a);
      int pid = std::stoi(b);
      long long count = std::stoll(c);
      require(aid >= 0 && pid >= 0 && count >= 0, ErrorCode::Parse,
              "negative id or count at line " + std::to_string(lineno));
      grouped[aid].push_back({pid, count});
      max_product = std::max(max_product, pid);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "bad number at line " + std::to_string(lineno));
    }
  }
  require(!grouped.empty(), ErrorCode::Parse, "no transaction rows");

  models::TransactionCounts out;
  out.num_products = max_product + 1;
  for (auto& [aid, rows] : grouped) {
    std::sort(rows.begin(), rows.end());
    std::vector<int> members;
    for (auto& [pid, count] : rows) members.push_back(pid);
    core::Assortment m(members);
    require(m.size() == static_cast<int>(rows.size()) ||
                (!rows.empty() && rows.front().first == 0),
            ErrorCode::Parse,
            "assortment " + std::to_string(aid) + " lists a product twice");
    // product 0 row may be omitted; treat the missing count as 0
    std::vector<long long> counts(m.size(), 0);
    for (auto& [pid, count] : rows) {
      auto it = std::lower_bound(m.members().begin(), m.members().end(), pid);
      counts[it - m.members().begin()] += count;
    }
    out.assortments.push_back(std::move(m));
    out.counts.push_back(std::move(counts));
  }
  return out;
}

}  // namespace cb::io
