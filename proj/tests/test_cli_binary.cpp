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

// Spawns the installed CLI binary and checks exit codes and artifacts.

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <string>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

std::string fixture(const std::string& name) {
  return std::string(IDPRICE_FIXTURE_DIR) + "/" + name;
}

int run(const std::string& args) {
  const std::string command =
      std::string(IDPRICE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WEXITSTATUS(raw);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("idprice_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("help and version exit zero") {
  CHECK(run("--help") == 0);
  CHECK(run("--version") == 0);
  CHECK(run("explore --help") == 0);
}

TEST_CASE("bad invocations exit with the usage code") {
  CHECK(run("") == 1);
  CHECK(run("explore --no-such-flag") == 1);
  CHECK(run("train --model transformer --out /tmp/x_idprice_cli") == 1);
}

TEST_CASE("missing input exits with the data code") {
  TempDir out("data_err");
  CHECK(run("explore --input /nonexistent/a.csv --out " + out.path.string()) ==
        2);
}

TEST_CASE("explore then evaluate end to end") {
  TempDir out("explore");
  CHECK(run("explore --input " + fixture("fig1_day.csv") + " --zone SE --out " +
            out.path.string()) == 0);
  CHECK(fs::exists(out.path / "variation.csv"));

  TempDir eval_out("eval");
  CHECK(run("evaluate --actual " + fixture("table4_actual.csv") +
            " --generated " + fixture("table4_generated.csv") + " --out " +
            eval_out.path.string()) == 0);
  CHECK(fs::exists(eval_out.path / "report.json"));
}

TEST_CASE("train honors CI mode seed enforcement") {
  TempDir out("ci");
  const std::string base = "train --model lstm --input " + fixture("sine.csv") +
                           " --zone SINE --epochs 2 --hidden 2 --window 3 " +
                           "--out " + out.path.string();
  const std::string command = "IDPRICE_CI=1 " + std::string(IDPRICE_CLI_PATH) +
                              " " + base + " >/dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(command.c_str())) == 1);
  CHECK(run(base + " --seed 4") == 0);
}
