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

#include "geoqc/calib.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

/// Schedule files: JSON documents holding the segments of every channel,
/// the flattened samples (xy as [re, im] pairs, flux as reals) and the ideal
/// target operator of the computational block.
namespace geoqc {

inline constexpr const char* kScheduleFormat = "geoqc-schedule";
inline constexpr int kScheduleFormatVersion = 1;

struct CompiledSchedule {
  PulseSchedule schedule;
  ComplexMatrix target;
};

namespace detail {

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) rr.push_back(m(i, j).real()), ir.push_back(m(i, j).imag());
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"re", re}, {"im", im}};
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const Index n = static_cast<Index>(re.size());
  if (n == 0 || im.size() != re.size()) throw std::invalid_argument("schedule file: malformed target matrix");
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    if (re[i].size() != static_cast<std::size_t>(n) || im[i].size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("schedule file: target matrix must be square");
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(re[i][j].get<double>(), im[i][j].get<double>());
  }
  return m;
}

}  // namespace detail

inline nlohmann::json schedule_to_json(const PulseSchedule& s, const ComplexMatrix& target) {
  s.validate();
  nlohmann::json j;
  j["format"] = kScheduleFormat;
  j["version"] = kScheduleFormatVersion;
  j["label"] = s.label;
  j["dt"] = s.dt;
  j["num_samples"] = s.num_samples();
  j["detuning_mhz"] = s.detuning_mhz;
  j["virtual_z"] = {s.virtual_z[0], s.virtual_z[1]};
  nlohmann::json channels = nlohmann::json::object(), samples = nlohmann::json::object();
  for (const auto& [c, segs] : s.channels) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& seg : segs) {
      nlohmann::json e;
      e["tag"] = seg.tag;
      e["phase"] = seg.phase;
      e["area"] = seg.area;
      e["drag_coefficient"] = seg.drag_coefficient;
      e["envelope"] = seg.envelope.samples;
      if (!seg.quadrature.samples.empty()) e["quadrature"] = seg.quadrature.samples;
      list.push_back(std::move(e));
    }
    channels[channel_name(c)] = std::move(list);
    nlohmann::json flat = nlohmann::json::array();
    for (const Complex& v : s.flatten(c)) {
      if (c == Channel::z_a)
        flat.push_back(v.real());
      else
        flat.push_back({v.real(), v.imag()});
    }
    samples[channel_name(c)] = std::move(flat);
  }
  j["channels"] = std::move(channels);
  j["samples"] = std::move(samples);
  j["target"] = detail::matrix_to_json(target);
  return j;
}

inline CompiledSchedule schedule_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != kScheduleFormat) throw std::invalid_argument("schedule file: unknown format");
  if (j.value("version", 0) != kScheduleFormatVersion)
    throw std::invalid_argument("schedule file: unsupported version");
  CompiledSchedule out;
  PulseSchedule& s = out.schedule;
  s.dt = j.at("dt").get<double>();
  if (!(s.dt > 0.0)) throw std::invalid_argument("schedule file: dt must be positive");
  s.label = j.value("label", "");
  s.detuning_mhz = j.value("detuning_mhz", 0.0);
  const auto vz = j.at("virtual_z");
  s.virtual_z = {vz.at(0).get<double>(), vz.at(1).get<double>()};
  for (const auto& [name, list] : j.at("channels").items()) {
    const Channel c = channel_from_name(name);
    s.channels[c] = {};
    for (const auto& e : list) {
      PulseSegment seg;
      seg.tag = e.value("tag", "");
      seg.phase = e.at("phase").get<double>();
      seg.drag_coefficient = e.value("drag_coefficient", 0.0);
      seg.envelope = {s.dt, e.at("envelope").get<std::vector<double>>()};
      if (e.contains("quadrature")) seg.quadrature = {s.dt, e.at("quadrature").get<std::vector<double>>()};
      seg.area = e.at("area").get<double>();
      s.append(c, std::move(seg));
    }
  }
  s.validate();
  out.target = detail::matrix_from_json(j.at("target"));
  const Index expected = s.drives(Channel::z_a) || (s.has_channel(Channel::xy_a) && s.has_channel(Channel::xy_b)) ? 4 : 2;
  if (out.target.rows() != expected)
    throw std::invalid_argument("schedule file: target dimension does not match the driven channels");
  return out;
}

inline void write_schedule(const std::string& path, const CompiledSchedule& c) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write schedule file '" + path + "'");
  f << schedule_to_json(c.schedule, c.target).dump(1) << "\n";
}

inline CompiledSchedule read_schedule(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open schedule file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("schedule file '" + path + "': " + e.what());
  }
  return schedule_from_json(j);
}

struct ScheduleVerification {
  double fidelity = 0.0;      // |Tr(U_target^dag U)|^2 / d^2 on the computational block
  double leakage = 0.0;
  bool target_is_identity = false;
  bool simulated_is_identity = false;
};

/// Simulates the schedule without errors or decoherence and compares the
/// computational block to the embedded target.
inline ScheduleVerification verify_schedule(const CompiledSchedule& c, const DeviceModel& device) {
  const ComplexMatrix u = gate_unitary(c.schedule, device.without_decoherence());
  if (u.rows() != c.target.rows()) throw std::invalid_argument("verify_schedule: target dimension mismatch");
  ScheduleVerification v;
  v.fidelity = trace_fidelity(c.target, u);
  v.leakage = std::max(0.0, 1.0 - (u.adjoint() * u).trace().real() / static_cast<double>(u.rows()));
  const double d2 = static_cast<double>(u.rows() * u.rows());
  v.target_is_identity = std::norm(c.target.trace()) / d2 > 1.0 - 1e-9;
  v.simulated_is_identity = std::norm(u.trace()) / d2 > 1.0 - 1e-6;
  return v;
}

// ---------------------------------------------------------------------------
// Gate compilation

struct CompileRequest {
  std::string gate;                  // named gate, "CZ", or empty for an explicit spec
  std::optional<GateSpec> spec;      // (theta, gamma, phi) loop
  GateKind kind = GateKind::geometric;
  GateConfig config = GateConfig::A;
  Channel channel = Channel::xy_a;
  double dt = kDefaultDt;
};

inline CompiledSchedule compile_gate(const CompileRequest& r, const DeviceModel& device) {
  if (r.channel == Channel::z_a) throw std::invalid_argument("compile: single-qubit gates play on xy_a or xy_b");
  const TransmonParams& q = r.channel == Channel::xy_b ? device.qubit_b : device.qubit_a;
  const PulseOptions po = PulseOptions::for_qubit(q, r.channel);
  if (r.spec) {
    GateSpec g = *r.spec;
    g.validate();
    g.config = r.config;
    if (r.kind == GateKind::geometric) {
      g.kind = GateKind::geometric;
      return {geometric_single_qubit(g, po.total_width, r.dt, po), target_unitary(g)};
    }
    if (std::abs(g.theta - kPi / 2) > 1e-12)
      throw std::invalid_argument("compile: dynamical gates need an equatorial axis (theta = pi/2)");
    const double angle = -2.0 * g.gamma;
    return {dynamical_single_qubit(angle, g.varphi, dynamical_width(angle, po.total_width), r.dt, po),
            target_unitary(g)};
  }
  if (r.gate == "CZ") return {calibrate_cz(device, kPi, r.dt).schedule(r.dt), cz_target_unitary(kPi)};
  const auto& names = named_gate_names();
  if (std::find(names.begin(), names.end(), r.gate) == names.end())
    throw std::invalid_argument("compile: unknown gate '" + r.gate + "'");
  return {named_gate(r.gate, r.kind, r.config, r.dt, po), named_gate_target(r.gate)};
}

}  // namespace geoqc
