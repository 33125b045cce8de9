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

#ifndef POVEX_PREDICTOR_EXTERNAL_MODEL_H_
#define POVEX_PREDICTOR_EXTERNAL_MODEL_H_

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "povex/predictor/model.h"

namespace povex::predictor {

// Child process speaking the line protocol:
//   request:  "PREDICT <count> <width>\n" then count lines of width
//             tab-separated decimals
//   response: count lines with one decimal each, then "OK\n"
// Access is serialized; the process is a single-lane resource.
class ExternalModel final : public PredictorModel {
 public:
  static absl::StatusOr<std::unique_ptr<ExternalModel>> Start(
      std::vector<std::string> argv);
  ~ExternalModel() override;

  ExternalModel(const ExternalModel&) = delete;
  ExternalModel& operator=(const ExternalModel&) = delete;

  absl::Status PredictBatch(std::span<const double> rows, size_t width,
                            std::span<double> out) const override;
  std::string model_id() const override;

 private:
  ExternalModel(std::vector<std::string> argv, int pid, int to_child,
                int from_child)
      : argv_(std::move(argv)),
        pid_(pid),
        to_child_(to_child),
        from_child_(from_child) {}

  absl::Status Exchange(const std::string& request, size_t count,
                        std::span<double> out) const;
  void Shutdown();

  std::vector<std::string> argv_;
  int pid_;
  int to_child_;
  int from_child_;
  mutable std::mutex mu_;
  mutable std::string pending_;  // bytes read past the last response
  mutable bool broken_ = false;
};

// Formats doubles as shortest round-trip decimals with '.' separators.
std::string FormatProtocolNumber(double value);

}  // namespace povex::predictor

#endif  // POVEX_PREDICTOR_EXTERNAL_MODEL_H_
