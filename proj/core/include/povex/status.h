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

#ifndef POVEX_STATUS_H_
#define POVEX_STATUS_H_

#include <optional>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace povex {

// Domain error kinds. Each one is attached to an absl::Status as a payload so
// that callers (the CLI exit-code mapper, the HTTP error mapper) can branch on
// the precise failure without parsing messages.
enum class ErrorKind {
  kSchemaMismatch,
  kParseError,
  kEmptyDataset,
  kAllMissingColumn,
  kContrastiveSetTooSmall,
  kEmptySubset,
  kEncodingError,
  kDegenerateDesign,
  kInvalidParams,
  kProtocolError,
  kProcessExit,
  kLengthMismatch,
  kPartitionError,
  kFingerprintMismatch,
  kBudgetExceeded,
  kIo,
  kInvalidArgument,
  kNotFound,
};

absl::string_view ErrorKindName(ErrorKind kind);

absl::Status MakeError(ErrorKind kind, absl::string_view message);

// Returns the kind attached by MakeError, or nullopt for OK / foreign statuses.
std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

inline bool IsErrorKind(const absl::Status& status, ErrorKind kind) {
  return GetErrorKind(status) == kind;
}

}  // namespace povex

#define POVEX_STATUS_CONCAT_INNER_(a, b) a##b
#define POVEX_STATUS_CONCAT_(a, b) POVEX_STATUS_CONCAT_INNER_(a, b)

#define POVEX_RETURN_IF_ERROR(expr)              \
  do {                                           \
    const absl::Status povex_status_ = (expr);   \
    if (!povex_status_.ok()) return povex_status_; \
  } while (0)

#define POVEX_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) return std::move(tmp).status();     \
  lhs = std::move(tmp).value()

#define POVEX_ASSIGN_OR_RETURN(lhs, expr) \
  POVEX_ASSIGN_OR_RETURN_IMPL_(           \
      POVEX_STATUS_CONCAT_(povex_statusor_, __LINE__), lhs, expr)

#endif  // POVEX_STATUS_H_
