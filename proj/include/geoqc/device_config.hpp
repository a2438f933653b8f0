// Copyright 2026 The geoqc Authors
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

#include "geoqc/device.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

/// Device configuration files.
///
/// One `key = value` pair per line; `#` starts a comment. Scalars are plain
/// numbers (`inf` is accepted for coherence times), matrices are JSON arrays
/// of rows. Units: GHz for qubit frequencies, MHz for anharmonicity and
/// coupling (f = omega / 2pi), us for T1 and T2*.
///
///   qubit_a.freq_ghz = 4.6019
///   crosstalk.flux_matrix = [[1, -0.0759], [0.0800, 1]]
namespace geoqc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_scalar(const std::string& v, const std::string& where) {
  std::string lower;
  for (char c : v) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

template <int N>
Eigen::Matrix<double, N, N> parse_matrix(const std::string& v, const std::string& where) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(v);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(where + ": malformed matrix (" + std::string(e.what()) + ")");
  }
  if (!j.is_array() || j.size() != N)
    throw ConfigError(where + ": expected " + std::to_string(N) + " rows");
  Eigen::Matrix<double, N, N> m;
  for (int r = 0; r < N; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != N)
      throw ConfigError(where + ": row " + std::to_string(r) + " must have " + std::to_string(N) + " entries");
    for (int c = 0; c < N; ++c) {
      const auto& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) throw ConfigError(where + ": matrix entries must be numbers");
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// Parses a device description. Every required key must be present exactly
/// once; unknown keys are rejected. Errors name the offending line.
inline DeviceModel parse_device_config(std::istream& in, const std::string& source = "<config>") {
  static const std::set<std::string> required{
      "qubit_a.freq_ghz",   "qubit_a.anharmonicity_mhz", "qubit_a.t1_us",         "qubit_a.t2_star_us",
      "qubit_b.freq_ghz",   "qubit_b.anharmonicity_mhz", "qubit_b.t1_us",         "qubit_b.t2_star_us",
      "coupling.g_ab_mhz",  "crosstalk.flux_matrix",     "readout.assignment_matrix"};
  static const std::set<std::string> optional{"qubit_a.levels", "qubit_b.levels"};
  DeviceModel d;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!required.count(key) && !optional.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (seen.count(key))
      throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
    seen[key] = lineno;
    if (value.empty()) throw ConfigError(where + ": missing value for '" + key + "'");
    TransmonParams& q = key.rfind("qubit_a.", 0) == 0 ? d.qubit_a : d.qubit_b;
    const std::string field = key.substr(key.find('.') + 1);
    if (key == "coupling.g_ab_mhz") {
      d.g_ab_mhz = detail::parse_scalar(value, where);
    } else if (key == "crosstalk.flux_matrix") {
      d.flux_crosstalk = detail::parse_matrix<2>(value, where);
    } else if (key == "readout.assignment_matrix") {
      d.readout_matrix = detail::parse_matrix<4>(value, where);
    } else if (field == "freq_ghz") {
      q.freq_ghz = detail::parse_scalar(value, where);
    } else if (field == "anharmonicity_mhz") {
      q.anharmonicity_mhz = detail::parse_scalar(value, where);
    } else if (field == "t1_us") {
      q.t1_us = detail::parse_scalar(value, where);
    } else if (field == "t2_star_us") {
      q.t2_star_us = detail::parse_scalar(value, where);
    } else if (field == "levels") {
      const double lv = detail::parse_scalar(value, where);
      if (lv != 2.0 && lv != 3.0) throw ConfigError(where + ": levels must be 2 or 3");
      q.levels = static_cast<int>(lv);
    }
  }
  for (const auto& k : required)
    if (!seen.count(k)) throw ConfigError(source + ": missing required key '" + k + "'");
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return d;
}

inline DeviceModel load_device_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open device config '" + path + "'");
  return parse_device_config(f, path);
}

inline std::string format_device_config(const DeviceModel& d) {
  std::ostringstream o;
  o << std::setprecision(10);
  auto num = [](double x) {
    std::ostringstream s;
    s << std::setprecision(10);
    if (std::isinf(x)) s << "inf";
    else s << x;
    return s.str();
  };
  for (const auto& [name, q] : {std::pair<std::string, const TransmonParams*>{"qubit_a", &d.qubit_a},
                                {"qubit_b", &d.qubit_b}}) {
    o << name << ".freq_ghz = " << num(q->freq_ghz) << "\n";
    o << name << ".anharmonicity_mhz = " << num(q->anharmonicity_mhz) << "\n";
    o << name << ".t1_us = " << num(q->t1_us) << "\n";
    o << name << ".t2_star_us = " << num(q->t2_star_us) << "\n";
    o << name << ".levels = " << q->levels << "\n";
  }
  o << "coupling.g_ab_mhz = " << num(d.g_ab_mhz) << "\n";
  auto mat = [&](const auto& m) {
    std::string s = "[";
    for (Index r = 0; r < m.rows(); ++r) {
      s += r ? ", [" : "[";
      for (Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + num(m(r, c));
      s += "]";
    }
    return s + "]";
  };
  o << "crosstalk.flux_matrix = " << mat(d.flux_crosstalk) << "\n";
  o << "readout.assignment_matrix = " << mat(d.readout_matrix) << "\n";
  return o.str();
}

}  // namespace geoqc
