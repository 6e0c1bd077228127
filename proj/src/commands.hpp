// Copyright 2026 idprice authors
//
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

#pragma once

#include <map>
#include <string>

namespace idprice {

// Stringly-typed command options. The CLI flags, the config-file keys and the
// C API option bag all funnel into this one map; each command validates and
// converts what it needs.
using Options = std::map<std::string, std::string>;

// True when `key` names a recognized option.
bool is_known_option(const std::string& key);

// Single key = value document ('#' comment lines, optional double quotes
// around values). Unknown keys are usage errors.
Options load_config_file(const std::string& path);

// Overlays `overrides` (e.g. command-line flags) on top of `base`.
Options merge_options(Options base, const Options& overrides);

// Each command throws idprice::Error on failure; the kind picks the exit
// code. All randomized commands require an explicit seed when the IDPRICE_CI
// environment variable is "1".
void cmd_explore(const Options& options);
void cmd_train(const Options& options);
void cmd_generate(const Options& options);
void cmd_evaluate(const Options& options);

}  // namespace idprice
