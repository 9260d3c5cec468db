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
// On-disk formats. JSON field names here are the contract; doubles are
// serialized shortest-round-trip, so every load(save(x)) == x bit for bit.
//
//   choice model   {"type":"sparse","n":N,"support":[{"ranks":[...],"prob":p},...]}
//                  {"type":"mnl","weights":[...]}
//                  {"type":"nl","weights":[...],"nests":[[...],...],"rho":r,"alpha":[...]}
//                  {"type":"mmnl","features":[[...],...],"theta":[...],
//                   "eta_mean":[...],"eta_sd":s,
//                   "integration":{"method":"auto|mc|gh","samples":n,
//                                  "gh_order":g,"seed":u}}
//   scheme         {"kind":"comparison|ranking|topset|censored","n":N}
//                  {"kind":"transaction","n":N,"assortments":[[0,...],...]}
//   data vector    {"scheme":{...},"labels":[...],"values":[...],
//                   "intervals":[[lo,hi],...]?}
//   prices         {"prices":[0,...]}
//   transactions   CSV with header assortment_id,product_id,count; every
//                  member of every assortment appears (zero counts included)

#ifndef CHOICEBOUND_JSON_IO_HPP_
#define CHOICEBOUND_JSON_IO_HPP_

#include <string>

#include "choicebound/core.hpp"
#include "choicebound/models.hpp"
#include "choicebound/robust.hpp"
#include "json.hpp"

namespace cb::io {

nlohmann::json model_to_json(const models::ChoiceModel& model);
models::ChoiceModel model_from_json(const nlohmann::json& j);

nlohmann::json scheme_to_json(const core::ObservationScheme& scheme);
core::ObservationScheme scheme_from_json(const nlohmann::json& j);

nlohmann::json data_to_json(const core::DataVector& data);
core::DataVector data_from_json(const nlohmann::json& j);

nlohmann::json prices_to_json(const core::PriceVector& prices);
core::PriceVector prices_from_json(const nlohmann::json& j);

/// Robust result as emitted by the predict CLI:
/// {"bound":..,"method":"..","status":"..","certificate":{..}?,"rounds":[..]?}
nlohmann::json result_to_json(const robust::RobustResult& result);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

void write_transactions_csv(const std::string& path,
                            const models::TransactionCounts& counts);
models::TransactionCounts read_transactions_csv(const std::string& path);

}  // namespace cb::io

#endif  // CHOICEBOUND_JSON_IO_HPP_
