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

#ifndef POVEX_TESTS_APP_APP_FIXTURE_H_
#define POVEX_TESTS_APP_APP_FIXTURE_H_

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

namespace povex::testing {

struct CliResult {
  int code = 0;
  std::string out, err;
};

// Runs `povex args...` in-process.
CliResult Povex(std::vector<std::string> args);

std::string ReadFile(const std::filesystem::path& path);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

// Small synthetic survey with linear and tree artifacts, built once per
// process under a temporary directory.
struct AppWorkspace {
  std::filesystem::path dir;
  std::string data, schema, linear, tree;
};
const AppWorkspace& Workspace();

}  // namespace povex::testing

#endif  // POVEX_TESTS_APP_APP_FIXTURE_H_
