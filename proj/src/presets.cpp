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
// Preset models built from the packaged DVD shopping-cart table
// (data/amzn.json) plus the random stress-test families derived from them.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>

#include "choicebound/models.hpp"
#include "json.hpp"

namespace cb::models {

namespace {

std::string data_file_path(const std::string& name) {
  if (const char* dir = std::getenv("CHOICEBOUND_DATA_DIR"))
    return std::string(dir) + "/" + name;
#ifdef CHOICEBOUND_DEFAULT_DATA_DIR
  return std::string(CHOICEBOUND_DEFAULT_DATA_DIR) + "/" + name;
#else
  return "data/" + name;
#endif
}

AmznTable load_amzn_table() {
  const std::string path = data_file_path("amzn.json");
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io,
          "cannot open preset table " + path +
              " (set CHOICEBOUND_DATA_DIR to the data directory)");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "bad preset table " + path + ": " + e.what());
  }
  AmznTable t;
  t.theta = j.at("theta").get<std::vector<double>>();
  require(t.theta.size() == 3, ErrorCode::Parse, "theta must have 3 entries");
  for (const auto& p : j.at("products")) {
    t.products.push_back({p.at("id").get<int>(), p.at("mean_utility").get<double>(),
                          p.at("price").get<double>(),
                          p.at("price_per_disc").get<double>(),
                          p.at("votes").get<double>()});
  }
  require(t.products.size() == 15, ErrorCode::Parse, "expected 15 products");
  return t;
}

int check_preset_n(int n) {
  require(n >= 2 && n <= 16, ErrorCode::InvalidArgument,
          "preset supports 2 <= N <= 16");
  return n;
}

// Consecutive near-even blocks over products 1..n-1. Mirrors the preset
// nesting {1-5},{6-9},{10-13},{14-15} at n=16 and scales it down with N.
std::vector<std::vector<int>> preset_nests(int n) {
  const int products = n - 1;
  const int l = std::min(4, products);
  std::vector<std::vector<int>> nests(l);
  if (n == 16) {
    nests = {{1, 2, 3, 4, 5}, {6, 7, 8, 9}, {10, 11, 12, 13}, {14, 15}};
    return nests;
  }
  int next = 1;
  for (int b = 0; b < l; ++b) {
    int take = products / l + (b < products % l ? 1 : 0);
    for (int k = 0; k < take; ++k) nests[b].push_back(next++);
  }
  return nests;
}

std::vector<std::vector<double>> preset_features(int n, const AmznTable& t) {
  std::vector<std::vector<double>> x;
  for (int j = 1; j < n; ++j)
    x.push_back({1.0, t.products[j - 1].price_per_disc, t.products[j - 1].votes});
  return x;
}

}  // namespace

const AmznTable& amzn_table() {
  static AmznTable table = load_amzn_table();
  return table;
}

MnlModel amzn_mnl(int n) {
  check_preset_n(n);
  const AmznTable& t = amzn_table();
  std::vector<double> w(n, 1.0);
  for (int j = 1; j < n; ++j) {
    const AmznProduct& p = t.products[j - 1];
    double u = t.theta[0] + t.theta[1] * p.price_per_disc + t.theta[2] * p.votes;
    w[j] = std::exp(u);
  }
  return MnlModel(std::move(w));
}

core::PriceVector amzn_prices(int n) {
  check_preset_n(n);
  const AmznTable& t = amzn_table();
  std::vector<double> p(n, 0.0);
  for (int j = 1; j < n; ++j) p[j] = t.products[j - 1].price;
  return core::PriceVector(std::move(p));
}

NestedLogitModel amzn_cnl(int n) {
  check_preset_n(n);
  const double rho = 0.5;
  auto nests = preset_nests(n);
  // Equal no-purchase membership in every nest: alpha = (1/L)^(1/rho).
  std::vector<double> alpha(nests.size(),
                            std::pow(1.0 / nests.size(), 1.0 / rho));
  return NestedLogitModel(amzn_mnl(n).weights, std::move(nests), rho,
                          std::move(alpha));
}

MmnlModel amzn_mmnl(int n, MmnlIntegration integration) {
  check_preset_n(n);
  const AmznTable& t = amzn_table();
  return MmnlModel(preset_features(n, t), t.theta, std::vector<double>(3, 0.0),
                   0.25, integration);
}

MnlModel mnl_rand(int n, rng::Engine& eng) {
  std::vector<double> w(n, 1.0);
  for (int j = 1; j < n; ++j) w[j] = std::exp(rng::uniform(eng, -5.0, 5.0));
  return MnlModel(std::move(w));
}

NestedLogitModel cnl_rand(int n, rng::Engine& eng) {
  const double rho = 0.5;
  auto nests = preset_nests(n);
  std::vector<double> alpha(nests.size(),
                            std::pow(1.0 / nests.size(), 1.0 / rho));
  std::vector<double> w(n, 1.0);
  for (int j = 1; j < n; ++j) w[j] = std::exp(rng::uniform(eng, -5.0, 5.0));
  return NestedLogitModel(std::move(w), std::move(nests), rho, std::move(alpha));
}

MmnlModel mmnl_rand(int n, double eta_sd, rng::Engine& eng,
                    MmnlIntegration integration) {
  check_preset_n(n);
  const AmznTable& t = amzn_table();
  std::vector<double> mu(3);
  for (double& m : mu) m = rng::uniform(eng, -1.0, 1.0);
  if (integration.seed == 0) integration.seed = eng();
  return MmnlModel(preset_features(n, t), t.theta, std::move(mu), eta_sd,
                   integration);
}

}  // namespace cb::models
