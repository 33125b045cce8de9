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

#ifndef POVEX_TOOLS_APP_SERVICE_H_
#define POVEX_TOOLS_APP_SERVICE_H_

#include <cstdint>
#include <iosfwd>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "povex/groups/groups.h"
#include "tools/app/context.h"

namespace httplib {
class Server;
}

namespace povex::app {

struct ServeOptions {
  std::string data, schema, model, dist;
  std::string host = "127.0.0.1";
  int port = 8080;
  int workers = 4;
  ExplainSettings settings;
  uint64_t default_seed = 0;
  double poverty_line = 0;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

// Bounded LRU map from request key to response body.
class ResponseCache {
 public:
  explicit ResponseCache(size_t capacity) : capacity_(capacity) {}
  std::optional<std::string> Get(const std::string& key);
  void Put(const std::string& key, std::string body);
  size_t size() const;

 private:
  size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::pair<std::string, std::string>> order_;  // front = newest
  std::unordered_map<std::string, decltype(order_)::iterator> index_;
};

// Read-only view over one ExplainContext and an optional distribution cache.
class ExplainService {
 public:
  struct Config {
    int workers = 4;
    uint64_t default_seed = 0;
    size_t cache_capacity = 1024;
  };

  static absl::StatusOr<std::unique_ptr<ExplainService>> Create(
      std::shared_ptr<const ExplainContext> context,
      std::optional<groups::ContrastiveDistribution> distribution,
      const Config& config);

  using Params = std::multimap<std::string, std::string>;

  HttpResponse Households(const Params& params) const;
  HttpResponse Explain(const std::string& body) const;
  HttpResponse IncomeDistribution(const Params& params) const;
  HttpResponse Radar(const std::string& household_id) const;

  // Routes under /v1/.
  void Mount(httplib::Server& server) const;

  const ExplainContext& context() const { return *context_; }
  size_t cached_responses() const { return cache_.size(); }

 private:
  ExplainService(std::shared_ptr<const ExplainContext> context,
                 std::optional<groups::ContrastiveDistribution> distribution,
                 const Config& config)
      : context_(std::move(context)),
        distribution_(std::move(distribution)),
        config_(config),
        slots_(config.workers),
        cache_(config.cache_capacity) {}

  // Report body for (row, algorithm, seed), via the idempotency cache.
  HttpResponse ReportBody(size_t row, engine::Algorithm algorithm,
                          uint64_t seed) const;

  std::shared_ptr<const ExplainContext> context_;
  std::optional<groups::ContrastiveDistribution> distribution_;
  Config config_;
  std::vector<double> predicted_;
  std::vector<size_t> rows_by_id_;
  mutable std::counting_semaphore<> slots_;
  mutable ResponseCache cache_;
};

HttpResponse ErrorResponse(int status, const std::string& code,
                           const std::string& message,
                           const std::string& detail = "");

// Loads artifacts, then blocks serving HTTP.
absl::Status RunServe(const ServeOptions& options, std::ostream& out,
                      std::ostream& err);

}  // namespace povex::app

#endif  // POVEX_TOOLS_APP_SERVICE_H_
