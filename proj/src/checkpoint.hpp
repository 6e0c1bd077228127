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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace idprice {

// Hex-float text representation: lossless, human-diffable, locale-free.
std::string double_to_hex(double value);
double double_from_hex(const std::string& text);

// FNV-1a over the little-endian bytes of the values; fingerprints the
// training data a checkpoint was produced from.
std::string fingerprint_doubles(std::span<const double> values);

struct ScalerInfo {
  double value_min = 0.0;
  double value_max = 0.0;
  double target_lo = -1.0;
  double target_hi = 1.0;

  bool operator==(const ScalerInfo&) const = default;
};

// Versioned, JSON-serialized model state. Every floating value is stored as
// hex-float text so load(save(c)) == c holds bit-exactly.
struct Checkpoint {
  int format_version = 1;
  std::string kind;  // lstm | dcgan | nuts
  std::uint64_t seed = 0;
  std::map<std::string, std::string> hyper;  // stringly-typed settings
  struct Array {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> data;

    bool operator==(const Array&) const = default;
  };
  std::vector<Array> arrays;
  std::optional<ScalerInfo> scaler;
  std::string data_fingerprint;

  const Array& array(const std::string& name) const;  // data error if absent
  bool operator==(const Checkpoint&) const = default;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace idprice
