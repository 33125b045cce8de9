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

#include "povex/status.h"

#include <array>
#include <string>

#include "absl/strings/cord.h"

namespace povex {
namespace {

constexpr absl::string_view kPayloadUrl = "type.povex/error_kind";

constexpr std::array<absl::string_view, 18> kNames = {
    "SCHEMA_MISMATCH",     "PARSE_ERROR",          "EMPTY_DATASET",
    "ALL_MISSING_COLUMN",  "CONTRASTIVE_SET_TOO_SMALL", "EMPTY_SUBSET",
    "ENCODING_ERROR",      "DEGENERATE_DESIGN",    "INVALID_PARAMS",
    "PROTOCOL_ERROR",      "PROCESS_EXIT",         "LENGTH_MISMATCH",
    "PARTITION_ERROR",     "FINGERPRINT_MISMATCH", "BUDGET",
    "IO_ERROR",            "INVALID_ARGUMENT",     "NOT_FOUND",
};

absl::StatusCode CanonicalCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return absl::StatusCode::kUnavailable;
    case ErrorKind::kNotFound:
      return absl::StatusCode::kNotFound;
    case ErrorKind::kBudgetExceeded:
      return absl::StatusCode::kResourceExhausted;
    case ErrorKind::kFingerprintMismatch:
      return absl::StatusCode::kAborted;
    case ErrorKind::kProcessExit:
    case ErrorKind::kProtocolError:
      return absl::StatusCode::kInternal;
    case ErrorKind::kContrastiveSetTooSmall:
    case ErrorKind::kEmptySubset:
    case ErrorKind::kAllMissingColumn:
    case ErrorKind::kEmptyDataset:
    case ErrorKind::kDegenerateDesign:
      return absl::StatusCode::kFailedPrecondition;
    default:
      return absl::StatusCode::kInvalidArgument;
  }
}

}  // namespace

absl::string_view ErrorKindName(ErrorKind kind) {
  return kNames[static_cast<size_t>(kind)];
}

absl::Status MakeError(ErrorKind kind, absl::string_view message) {
  absl::Status status(CanonicalCode(kind), message);
  status.SetPayload(kPayloadUrl, absl::Cord(ErrorKindName(kind)));
  return status;
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  const auto payload = status.GetPayload(kPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  const std::string name(*payload);
  for (size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<ErrorKind>(i);
  }
  return std::nullopt;
}

}  // namespace povex
