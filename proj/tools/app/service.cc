/*
 * Copyright 2026 The Povex Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tools/app/service.h"

#include <algorithm>
#include <charconv>
#include <iostream>

#include "absl/strings/str_cat.h"
#include "httplib.h"
#include "nlohmann/json.hpp"
#include "povex/status.h"
#include "tools/app/report.h"

namespace povex::app {

using nlohmann::json;

std::optional<std::string> ResponseCache::Get(const std::string& key) {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->second;
}

void ResponseCache::Put(const std::string& key, std::string body) {
  if (capacity_ == 0) return;
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = index_.find(key);
  if (it != index_.end()) {
    it->second->second = std::move(body);
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  order_.emplace_front(key, std::move(body));
  index_[key] = order_.begin();
  while (order_.size() > capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
}

size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return order_.size();
}

HttpResponse ErrorResponse(int status, const std::string& code,
                           const std::string& message,
                           const std::string& detail) {
  json body = {{"code", code}, {"message", message}};
  if (!detail.empty()) body["detail"] = detail;
  return {status, DumpJson(body)};
}

namespace {

std::optional<uint64_t> ParseUnsigned(const std::string& text) {
  uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

HttpResponse FromStatus(const absl::Status& status) {
  const auto kind = GetErrorKind(status);
  const std::string message(status.message());
  switch (kind.value_or(ErrorKind::kIo)) {
    case ErrorKind::kBudgetExceeded:
      return ErrorResponse(422, "BUDGET", message);
    case ErrorKind::kContrastiveSetTooSmall:
      return ErrorResponse(422, "CONTRASTIVE_SET_TOO_SMALL", message);
    case ErrorKind::kFingerprintMismatch:
      return ErrorResponse(409, "FINGERPRINT_MISMATCH", message);
    case ErrorKind::kNotFound:
      return ErrorResponse(404, "NOT_FOUND", message);
    case ErrorKind::kInvalidParams:
    case ErrorKind::kInvalidArgument:
      return ErrorResponse(400, "BAD_REQUEST", message);
    default:
      return ErrorResponse(
          500, kind ? std::string(ErrorKindName(*kind)) : "INTERNAL", message);
  }
}

// Rejects keys outside `allowed`, naming the first offender.
std::optional<HttpResponse> CheckKeys(const ExplainService::Params& params,
                                      std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : params) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      return ErrorResponse(400, "BAD_REQUEST",
                           absl::StrCat("unknown query key `", key, "`"));
    }
    if (params.count(key) > 1) {
      return ErrorResponse(400, "BAD_REQUEST",
                           absl::StrCat("query key `", key, "` repeated"));
    }
  }
  return std::nullopt;
}

}  // namespace

absl::StatusOr<std::unique_ptr<ExplainService>> ExplainService::Create(
    std::shared_ptr<const ExplainContext> context,
    std::optional<groups::ContrastiveDistribution> distribution,
    const Config& config) {
  if (config.workers < 1) {
    return MakeError(ErrorKind::kInvalidParams, "workers must be at least 1");
  }
  std::unique_ptr<ExplainService> service(
      new ExplainService(std::move(context), std::move(distribution), config));
  POVEX_ASSIGN_OR_RETURN(service->predicted_, service->context_->PredictAll());
  const auto& ids = service->context_->dataset().metadata().ids;
  service->rows_by_id_.resize(service->context_->dataset().num_rows());
  for (size_t i = 0; i < service->rows_by_id_.size(); ++i) {
    service->rows_by_id_[i] = i;
  }
  auto id_of = [&](size_t r) {
    return r < ids.size() ? ids[r] : absl::StrCat(r);
  };
  std::stable_sort(service->rows_by_id_.begin(), service->rows_by_id_.end(),
                   [&](size_t a, size_t b) { return id_of(a) < id_of(b); });
  return service;
}

HttpResponse ExplainService::Households(const Params& params) const {
  if (auto bad = CheckKeys(params, {"offset", "limit"})) return *bad;
  uint64_t offset = 0;
  uint64_t limit = 50;
  for (const auto& [key, value] : params) {
    const auto parsed = ParseUnsigned(value);
    if (!parsed) {
      return ErrorResponse(400, "BAD_REQUEST",
                           absl::StrCat("`", key, "` must be a non-negative integer"),
                           value);
    }
    (key == "offset" ? offset : limit) = *parsed;
  }
  if (limit > 1000) {
    return ErrorResponse(400, "BAD_REQUEST", "`limit` must be at most 1000");
  }
  const auto& dataset = context_->dataset();
  const size_t total = dataset.num_rows();
  json items = json::array();
  for (uint64_t i = offset; i < total && i < offset + limit; ++i) {
    const size_t row = rows_by_id_[i];
    const auto h = dataset.Row(row);
    items.push_back(
        {{"id", h.id},
         {"predicted_income", predicted_[row]},
         {"observed_formal_income", h.observed_formal_income
                                        ? json(*h.observed_formal_income)
                                        : json(nullptr)},
         {"collection_date",
          h.collection_date ? json(*h.collection_date) : json(nullptr)},
         {"missing_count", h.MissingIndices().size()}});
  }
  return {200, DumpJson({{"total", total},
                         {"offset", offset},
                         {"limit", limit},
                         {"items", items}})};
}

HttpResponse ExplainService::ReportBody(size_t row, engine::Algorithm algorithm,
                                        uint64_t seed) const {
  const bool contrastive = algorithm == engine::Algorithm::kContrastive;
  const std::string fingerprint = context_->Fingerprint(algorithm, seed);
  if (contrastive) {
    if (!distribution_) {
      return ErrorResponse(409, "DISTRIBUTION_UNAVAILABLE",
                           "the service has no contrastive distribution cache");
    }
    if (distribution_->fingerprint() != fingerprint) {
      return ErrorResponse(
          409, "FINGERPRINT_MISMATCH",
          "request configuration differs from the distribution cache",
          absl::StrCat("request ", fingerprint, ", cache ",
                       distribution_->fingerprint()));
    }
  }
  const auto& dataset = context_->dataset();
  const std::string key =
      absl::StrCat(dataset.Row(row).id, "|", engine::AlgorithmName(algorithm),
                   "|", seed, "|", fingerprint);
  if (auto hit = cache_.Get(key)) return {200, *hit};
  if (!slots_.try_acquire()) {
    return ErrorResponse(429, "BUSY", "all explanation workers are busy");
  }
  auto report = context_->Report(row, algorithm, seed,
                                 contrastive ? &*distribution_ : nullptr);
  slots_.release();
  if (!report.ok()) return FromStatus(report.status());
  std::string body = DumpJson(*report);
  cache_.Put(key, body);
  return {200, std::move(body)};
}

HttpResponse ExplainService::Explain(const std::string& body) const {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::exception& e) {
    return ErrorResponse(400, "BAD_REQUEST", "request body is not JSON", e.what());
  }
  if (!request.is_object()) {
    return ErrorResponse(400, "BAD_REQUEST", "request body must be an object");
  }
  for (const auto& [key, value] : request.items()) {
    if (key != "household_id" && key != "algorithm" && key != "seed") {
      return ErrorResponse(400, "BAD_REQUEST",
                           absl::StrCat("unknown field `", key, "`"));
    }
  }
  if (!request.contains("household_id") || !request["household_id"].is_string()) {
    return ErrorResponse(400, "BAD_REQUEST", "`household_id` must be a string");
  }
  engine::Algorithm algorithm = engine::Algorithm::kContrastive;
  if (request.contains("algorithm")) {
    if (!request["algorithm"].is_string()) {
      return ErrorResponse(400, "BAD_REQUEST", "`algorithm` must be a string");
    }
    auto parsed = engine::ParseAlgorithm(request["algorithm"].get<std::string>());
    if (!parsed.ok()) {
      return ErrorResponse(400, "BAD_REQUEST", std::string(parsed.status().message()));
    }
    algorithm = *parsed;
  }
  uint64_t seed = config_.default_seed;
  if (request.contains("seed")) {
    if (!request["seed"].is_number_unsigned()) {
      return ErrorResponse(400, "BAD_REQUEST",
                           "`seed` must be a non-negative integer");
    }
    seed = request["seed"].get<uint64_t>();
  }
  const std::string id = request["household_id"].get<std::string>();
  const auto row = context_->dataset().RowIndexById(id);
  if (!row) {
    return ErrorResponse(404, "NOT_FOUND",
                         absl::StrCat("unknown household `", id, "`"));
  }
  return ReportBody(*row, algorithm, seed);
}

HttpResponse ExplainService::IncomeDistribution(const Params& params) const {
  if (auto bad = CheckKeys(params, {"household_id", "bins"})) return *bad;
  int bins = kDefaultHistogramBins;
  std::optional<HistogramMarker> marker;
  const auto& dataset = context_->dataset();
  if (const auto it = params.find("bins"); it != params.end()) {
    const auto parsed = ParseUnsigned(it->second);
    if (!parsed || *parsed < 1 || *parsed > 10000) {
      return ErrorResponse(400, "BAD_REQUEST", "`bins` must be in [1, 10000]",
                           it->second);
    }
    bins = static_cast<int>(*parsed);
  }
  if (const auto it = params.find("household_id"); it != params.end()) {
    const auto row = dataset.RowIndexById(it->second);
    if (!row) {
      return ErrorResponse(404, "NOT_FOUND",
                           absl::StrCat("unknown household `", it->second, "`"));
    }
    const auto h = dataset.Row(*row);
    marker = HistogramMarker{h.id, predicted_[*row], h.observed_formal_income};
  }
  return {200, DumpJson(BuildHistogram(dataset.income(), bins, marker))};
}

HttpResponse ExplainService::Radar(const std::string& household_id) const {
  const auto row = context_->dataset().RowIndexById(household_id);
  if (!row) {
    return ErrorResponse(404, "NOT_FOUND",
                         absl::StrCat("unknown household `", household_id, "`"));
  }
  if (!distribution_) {
    return ErrorResponse(409, "DISTRIBUTION_UNAVAILABLE",
                         "the service has no contrastive distribution cache");
  }
  uint64_t seed = config_.default_seed;
  const auto& cfg = distribution_->config();
  if (cfg.contains("seed") && cfg["seed"].is_number_unsigned()) {
    seed = cfg["seed"].get<uint64_t>();
  }
  HttpResponse report = ReportBody(*row, engine::Algorithm::kContrastive, seed);
  if (report.status != 200) return report;
  auto focal = GroupsFromReport(json::parse(report.body));
  if (!focal.ok()) return FromStatus(focal.status());
  auto radar = BuildRadar(household_id, *focal, *distribution_);
  if (!radar.ok()) return FromStatus(radar.status());
  return {200, DumpJson(*radar)};
}

void ExplainService::Mount(httplib::Server& server) const {
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  };
  auto params_of = [](const httplib::Request& req) {
    return Params(req.params.begin(), req.params.end());
  };
  server.Get("/v1/households", [=, this](const httplib::Request& req,
                                         httplib::Response& res) {
    reply(res, Households(params_of(req)));
  });
  server.Post("/v1/explain", [=, this](const httplib::Request& req,
                                       httplib::Response& res) {
    reply(res, Explain(req.body));
  });
  server.Get("/v1/income-distribution", [=, this](const httplib::Request& req,
                                                  httplib::Response& res) {
    reply(res, IncomeDistribution(params_of(req)));
  });
  server.Get(R"(/v1/radar/([^/]+))", [=, this](const httplib::Request& req,
                                               httplib::Response& res) {
    reply(res, Radar(req.matches[1]));
  });
  server.set_error_handler([=](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    reply(res, ErrorResponse(res.status, res.status == 404 ? "NOT_FOUND" : "ERROR",
                             absl::StrCat("HTTP ", res.status)));
  });
}

absl::Status RunServe(const ServeOptions& options, std::ostream& out,
                      std::ostream& err) {
  POVEX_ASSIGN_OR_RETURN(std::shared_ptr<const ExplainContext> context,
                         ExplainContext::Load(options.data, options.schema,
                                              options.model, options.settings));
  std::optional<groups::ContrastiveDistribution> dist;
  if (!options.dist.empty()) {
    POVEX_ASSIGN_OR_RETURN(dist,
                           groups::ContrastiveDistribution::Load(options.dist));
  }
  ExplainService::Config config;
  config.workers = options.workers;
  config.default_seed = options.default_seed;
  POVEX_ASSIGN_OR_RETURN(auto service,
                         ExplainService::Create(context, std::move(dist), config));
  httplib::Server server;
  service->Mount(server);
  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
  } else if (!server.bind_to_port(options.host, port)) {
    return MakeError(ErrorKind::kIo, absl::StrCat("cannot bind ", options.host,
                                                  ":", options.port));
  }
  if (port < 0) return MakeError(ErrorKind::kIo, "cannot bind a port");
  out << "listening on http://" << options.host << ":" << port << "/v1/"
      << std::endl;
  if (!server.listen_after_bind()) {
    return MakeError(ErrorKind::kIo, "server stopped unexpectedly");
  }
  (void)err;
  return absl::OkStatus();
}

}  // namespace povex::app
