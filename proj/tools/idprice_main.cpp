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

// idprice CLI: explore | train | generate | evaluate. Thin shell over the
// libidprice C API; every flag becomes an option-bag entry.

#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idprice.h"

namespace {

struct OptionsDeleter {
  void operator()(idp_options* options) const { idp_options_free(options); }
};
using OptionsPtr = std::unique_ptr<idp_options, OptionsDeleter>;

// Collects --flag values as strings; unset flags stay absent from the bag.
class FlagBag {
 public:
  void add(CLI::App* app, const std::string& key, const std::string& help) {
    values_.push_back(std::make_unique<Entry>());
    Entry* entry = values_.back().get();
    entry->key = key;
    app->add_option("--" + key, entry->value, help);
  }

  void add_flag(CLI::App* app, const std::string& key,
                const std::string& help) {
    values_.push_back(std::make_unique<Entry>());
    Entry* entry = values_.back().get();
    entry->key = key;
    entry->is_flag = true;
    app->add_flag("--" + key, entry->flag, help);
  }

  int apply(idp_options* options) const {
    for (const auto& entry : values_) {
      const char* value = nullptr;
      if (entry->is_flag) {
        if (!entry->flag) continue;
        value = "true";
      } else {
        if (entry->value.empty()) continue;
        value = entry->value.c_str();
      }
      idp_error* error = nullptr;
      const idp_status status =
          idp_options_set(options, entry->key.c_str(), value, &error);
      if (status != IDP_OK) {
        std::fprintf(stderr, "idprice: %s\n", idp_error_message(error));
        idp_error_free(error);
        return status;
      }
    }
    return IDP_OK;
  }

 private:
  struct Entry {
    std::string key;
    std::string value;
    bool flag = false;
    bool is_flag = false;
  };
  std::vector<std::unique_ptr<Entry>> values_;
};

int run_command(const FlagBag& bag, const std::string& config_path,
                idp_status (*command)(const idp_options*, idp_error**)) {
  OptionsPtr options(idp_options_new());
  if (const int status = bag.apply(options.get()); status != IDP_OK) {
    return status;
  }
  if (!config_path.empty()) {
    idp_error* error = nullptr;
    if (idp_options_load_file(options.get(), config_path.c_str(), &error) !=
        IDP_OK) {
      std::fprintf(stderr, "idprice: %s\n", idp_error_message(error));
      const int status = idp_error_status(error);
      idp_error_free(error);
      return status;
    }
  }
  idp_error* error = nullptr;
  const idp_status status = command(options.get(), &error);
  if (status != IDP_OK) {
    std::fprintf(stderr, "idprice: %s\n", idp_error_message(error));
    idp_error_free(error);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intraday electricity price modeling toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", idp_version());

  struct Sub {
    CLI::App* app;
    FlagBag bag;
    std::string config;
    idp_status (*command)(const idp_options*, idp_error**);
  };
  std::vector<std::unique_ptr<Sub>> subs;

  const auto make_sub = [&](const std::string& name, const std::string& help,
                            idp_status (*command)(const idp_options*,
                                                  idp_error**)) -> Sub& {
    subs.push_back(std::make_unique<Sub>());
    Sub& sub = *subs.back();
    sub.app = app.add_subcommand(name, help);
    sub.command = command;
    sub.app->add_option("--config", sub.config,
                        "key = value config file (flags win)");
    return sub;
  };

  Sub& explore = make_sub("explore", "Market statistics and histograms",
                          idp_run_explore);
  explore.bag.add(explore.app, "input", "market CSV file");
  explore.bag.add(explore.app, "da-input",
                  "optional CSV whose volumes are DA-market volumes");
  explore.bag.add(explore.app, "zone", "bidding zone filter");
  explore.bag.add(explore.app, "field", "price field: avg|high|low|last|da");
  explore.bag.add(explore.app, "bins", "histogram bin count");
  explore.bag.add(explore.app, "out", "output directory");

  Sub& train = make_sub("train", "Fit a price model and write a checkpoint",
                        idp_run_train);
  train.bag.add(train.app, "model", "lstm|dcgan|nuts");
  train.bag.add(train.app, "input", "market CSV file");
  train.bag.add(train.app, "zone", "bidding zone");
  train.bag.add(train.app, "field", "price field: avg|high|low|last|da");
  train.bag.add(train.app, "train-range", "YYYY-MM-DD:YYYY-MM-DD");
  train.bag.add(train.app, "test-range", "YYYY-MM-DD:YYYY-MM-DD");
  train.bag.add(train.app, "epochs", "training epochs");
  train.bag.add(train.app, "hidden", "lstm hidden units");
  train.bag.add(train.app, "window", "lstm input window (hours)");
  train.bag.add(train.app, "lr", "learning rate");
  train.bag.add(train.app, "latent", "dcgan latent dimension");
  train.bag.add(train.app, "batch", "dcgan batch size");
  train.bag.add(train.app, "arch", "dcgan architecture: conv|dense");
  train.bag.add(train.app, "components", "nuts mixture components (1..5)");
  train.bag.add(train.app, "warmup", "nuts warmup draws");
  train.bag.add(train.app, "samples", "nuts kept draws");
  train.bag.add(train.app, "target-accept", "nuts target acceptance (0,1)");
  train.bag.add(train.app, "hour", "nuts hour filter (0..23)");
  train.bag.add(train.app, "seed", "random seed");
  train.bag.add(train.app, "out", "output directory");

  Sub& generate = make_sub("generate", "Sample scenarios from a checkpoint",
                           idp_run_generate);
  generate.bag.add(generate.app, "checkpoint", "checkpoint.json path");
  generate.bag.add(generate.app, "count", "number of scenarios/draws");
  generate.bag.add(generate.app, "date", "profile date (lstm), YYYY-MM-DD");
  generate.bag.add(generate.app, "input", "market CSV with history (lstm)");
  generate.bag.add(generate.app, "zone", "zone override (lstm)");
  generate.bag.add(generate.app, "field", "field override (lstm)");
  generate.bag.add_flag(generate.app, "one-step",
                        "predict each hour from actuals (lstm)");
  generate.bag.add(generate.app, "seed", "random seed");
  generate.bag.add(generate.app, "out", "output directory");

  Sub& evaluate = make_sub("evaluate", "Compare actual vs generated prices",
                           idp_run_evaluate);
  evaluate.bag.add(evaluate.app, "actual", "actual values CSV");
  evaluate.bag.add(evaluate.app, "generated", "generated values CSV");
  evaluate.bag.add(evaluate.app, "zone", "zone filter for market CSVs");
  evaluate.bag.add(evaluate.app, "field", "field for market CSVs");
  evaluate.bag.add(evaluate.app, "bins", "histogram bin count");
  evaluate.bag.add(evaluate.app, "out", "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return IDP_USAGE_ERROR;
  }

  for (const auto& sub : subs) {
    if (sub->app->parsed()) {
      return run_command(sub->bag, sub->config, sub->command);
    }
  }
  return IDP_USAGE_ERROR;
}
