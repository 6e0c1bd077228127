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

#include "checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "json.hpp"

namespace idprice {

std::string double_to_hex(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", value);
  return buf;
}

double double_from_hex(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + text.size() || text.empty()) {
    throw Error::data("checkpoint: malformed float '" + text + "'");
  }
  return value;
}

std::string fingerprint_doubles(std::span<const double> values) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const double value : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (bits >> (8 * byte)) & 0xffULL;
      hash *= 0x100000001b3ULL;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

const Checkpoint::Array& Checkpoint::array(const std::string& name) const {
  for (const Array& a : arrays) {
    if (a.name == name) return a;
  }
  throw Error::data("checkpoint: missing array '" + name + "'");
}

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  nlohmann::json j;
  j["format_version"] = checkpoint.format_version;
  j["kind"] = checkpoint.kind;
  j["seed"] = checkpoint.seed;
  j["hyper"] = checkpoint.hyper;
  nlohmann::json arrays = nlohmann::json::array();
  for (const Checkpoint::Array& a : checkpoint.arrays) {
    nlohmann::json data = nlohmann::json::array();
    for (const double v : a.data) data.push_back(double_to_hex(v));
    arrays.push_back({{"name", a.name}, {"shape", a.shape},
                      {"data", std::move(data)}});
  }
  j["arrays"] = std::move(arrays);
  if (checkpoint.scaler) {
    j["scaler"] = {{"min", double_to_hex(checkpoint.scaler->value_min)},
                   {"max", double_to_hex(checkpoint.scaler->value_max)},
                   {"lo", double_to_hex(checkpoint.scaler->target_lo)},
                   {"hi", double_to_hex(checkpoint.scaler->target_hi)}};
  }
  j["data_fingerprint"] = checkpoint.data_fingerprint;
  return j.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error::data(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  try {
    Checkpoint c;
    c.format_version = j.at("format_version").get<int>();
    if (c.format_version != 1) {
      throw Error::data("checkpoint: unsupported format version " +
                        std::to_string(c.format_version));
    }
    c.kind = j.at("kind").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("hyper")) {
      c.hyper = j.at("hyper").get<std::map<std::string, std::string>>();
    }
    for (const auto& entry : j.at("arrays")) {
      Checkpoint::Array a;
      a.name = entry.at("name").get<std::string>();
      a.shape = entry.at("shape").get<std::vector<std::size_t>>();
      std::size_t expected = 1;
      for (const std::size_t d : a.shape) expected *= d;
      for (const auto& value : entry.at("data")) {
        a.data.push_back(double_from_hex(value.get<std::string>()));
      }
      if (a.data.size() != expected) {
        throw Error::data("checkpoint: array '" + a.name +
                          "' does not match its shape");
      }
      c.arrays.push_back(std::move(a));
    }
    if (j.contains("scaler")) {
      const auto& s = j.at("scaler");
      c.scaler = ScalerInfo{
          double_from_hex(s.at("min").get<std::string>()),
          double_from_hex(s.at("max").get<std::string>()),
          double_from_hex(s.at("lo").get<std::string>()),
          double_from_hex(s.at("hi").get<std::string>())};
    }
    c.data_fingerprint = j.at("data_fingerprint").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error::data(std::string("checkpoint: missing or mistyped field: ") +
                      e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data("cannot write '" + path + "'");
  out << checkpoint_to_json(checkpoint) << '\n';
  if (!out) throw Error::data("failed writing '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

}  // namespace idprice
