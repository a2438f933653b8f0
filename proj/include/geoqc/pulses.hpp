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

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

/// Pulse-schedule synthesis.
///
/// A schedule is a set of sample arrays on a common time grid of spacing `dt`
/// (ns). Sample k covers [k dt, (k+1) dt) and holds the value of the continuous
/// waveform at the midpoint. XY samples are Rabi rates Omega / 2pi in MHz, Z
/// samples are frequency offsets in MHz.
namespace geoqc {

inline constexpr double kDefaultDt = 0.05;
inline constexpr double kSingleQubitGateWidth = 80.0;
inline constexpr double kDefaultCzEdge = 8.0;

struct Envelope {
  double dt = kDefaultDt;
  std::vector<double> samples;

  static Envelope zeros(double dt, std::size_t n) { return {dt, std::vector<double>(n, 0.0)}; }

  double duration() const { return dt * static_cast<double>(samples.size()); }
  std::size_t size() const { return samples.size(); }

  /// Integral of the angular Rabi rate, in radians.
  double area() const {
    double s = 0.0;
    for (double v : samples) s += v;
    return angular(s) * dt;
  }

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("Envelope: dt must be positive");
    for (double v : samples)
      if (!std::isfinite(v)) throw std::invalid_argument("Envelope: non-finite sample");
  }
};

struct PulseSegment {
  Envelope envelope;       // in-phase component
  Envelope quadrature;     // DRAG component; empty when unused
  double phase = 0.0;      // drive phase, or modulation phase on z channels
  double drag_coefficient = 0.0;
  double area = 0.0;       // radians, cached from the in-phase envelope
  std::string tag;

  static PulseSegment idle(double dt, std::size_t n) {
    PulseSegment s;
    s.envelope = Envelope::zeros(dt, n);
    s.tag = "idle";
    return s;
  }

  std::size_t size() const { return envelope.size(); }
  double duration() const { return envelope.duration(); }

  /// Complex drive amplitude Omega e^{i phi} of sample k, in MHz.
  Complex sample(std::size_t k) const {
    const double q = quadrature.samples.empty() ? 0.0 : quadrature.samples[k];
    return Complex(envelope.samples[k], q) * std::polar(1.0, phase);
  }

  bool is_zero() const {
    auto nz = [](const Envelope& e) {
      return std::any_of(e.samples.begin(), e.samples.end(), [](double v) { return v != 0.0; });
    };
    return !nz(envelope) && !nz(quadrature);
  }

  void validate() const {
    envelope.validate();
    if (!quadrature.samples.empty()) {
      quadrature.validate();
      if (quadrature.size() != envelope.size() || quadrature.dt != envelope.dt)
        throw std::invalid_argument("PulseSegment: quadrature grid differs from envelope grid");
    }
    if (std::abs(area - envelope.area()) > 1e-6)
      throw std::invalid_argument("PulseSegment: cached area does not match envelope integral");
  }
};

enum class Channel { xy_a, xy_b, z_a };

inline std::string channel_name(Channel c) {
  switch (c) {
    case Channel::xy_a: return "xy_a";
    case Channel::xy_b: return "xy_b";
    case Channel::z_a: return "z_a";
  }
  return "?";
}

inline Channel channel_from_name(const std::string& s) {
  if (s == "xy_a") return Channel::xy_a;
  if (s == "xy_b") return Channel::xy_b;
  if (s == "z_a") return Channel::z_a;
  throw std::invalid_argument("unknown channel '" + s + "'");
}

struct PulseSchedule {
  double dt = kDefaultDt;
  std::map<Channel, std::vector<PulseSegment>> channels;
  double detuning_mhz = 0.0;             // static detuning error on driven qubits
  std::array<double, 2> virtual_z{0, 0};  // frame rotations exp(i theta n) applied after the pulses
  std::string label;

  std::size_t channel_samples(Channel c) const {
    auto it = channels.find(c);
    if (it == channels.end()) return 0;
    std::size_t n = 0;
    for (const auto& s : it->second) n += s.size();
    return n;
  }

  std::size_t num_samples() const {
    std::size_t n = 0;
    for (const auto& [c, segs] : channels) n = std::max(n, channel_samples(c));
    return n;
  }

  double total_duration() const { return dt * static_cast<double>(num_samples()); }

  bool has_channel(Channel c) const { return channels.count(c) != 0; }

  /// True if the channel carries any nonzero sample.
  bool drives(Channel c) const {
    auto it = channels.find(c);
    if (it == channels.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [](const PulseSegment& s) { return !s.is_zero(); });
  }

  void append(Channel c, PulseSegment seg) {
    if (seg.envelope.dt != dt) throw std::invalid_argument("PulseSchedule::append: segment dt differs from schedule dt");
    channels[c].push_back(std::move(seg));
  }

  /// Pads every channel with idle samples up to `n` samples.
  void pad_to(std::size_t n) {
    for (auto& [c, segs] : channels) {
      const std::size_t have = channel_samples(c);
      if (have < n) segs.push_back(PulseSegment::idle(dt, n - have));
    }
  }

  /// Flattened complex samples of one channel, zero-padded to num_samples().
  /// Flux samples already carry their modulation phase and are returned as is.
  std::vector<Complex> flatten(Channel c) const {
    std::vector<Complex> out(num_samples(), Complex(0.0));
    auto it = channels.find(c);
    if (it == channels.end()) return out;
    std::size_t k = 0;
    for (const auto& s : it->second)
      for (std::size_t j = 0; j < s.size(); ++j) out[k++] = c == Channel::z_a ? Complex(s.envelope.samples[j]) : s.sample(j);
    return out;
  }

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("PulseSchedule: dt must be positive");
    const std::size_t n = num_samples();
    for (const auto& [c, segs] : channels) {
      for (const auto& s : segs) {
        s.validate();
        if (s.envelope.dt != dt) throw std::invalid_argument("PulseSchedule: segment dt differs from schedule dt");
      }
      if (channel_samples(c) != n)
        throw std::invalid_argument("PulseSchedule: channel " + channel_name(c) +
                                    " duration differs from total duration");
    }
  }

  /// This schedule followed by `next`. Pending virtual Z rotations of this
  /// schedule are pushed through `next` by shifting its drive phases.
  PulseSchedule then(const PulseSchedule& next) const {
    if (next.dt != dt) throw std::invalid_argument("PulseSchedule::then: schedules use different dt");
    PulseSchedule out = *this;
    const std::size_t n0 = num_samples();
    for (const auto& [c, segs] : next.channels)
      if (!out.has_channel(c)) out.channels[c] = {};
    out.pad_to(n0);
    for (const auto& [c, segs] : next.channels) {
      const double shift = c == Channel::xy_a ? virtual_z[0] : c == Channel::xy_b ? virtual_z[1] : 0.0;
      for (auto s : segs) {
        s.phase -= shift;
        out.channels[c].push_back(std::move(s));
      }
    }
    out.pad_to(n0 + next.num_samples());
    out.virtual_z = {virtual_z[0] + next.virtual_z[0], virtual_z[1] + next.virtual_z[1]};
    out.detuning_mhz = detuning_mhz;
    out.label = label.empty() ? next.label : next.label.empty() ? label : label + "," + next.label;
    return out;
  }

  /// This schedule and `other` played simultaneously on disjoint channels,
  /// both starting at t = 0; the shorter one is padded.
  PulseSchedule alongside(const PulseSchedule& other) const {
    if (other.dt != dt) throw std::invalid_argument("PulseSchedule::alongside: schedules use different dt");
    PulseSchedule out = *this;
    for (const auto& [c, segs] : other.channels) {
      if (out.has_channel(c)) throw std::invalid_argument("PulseSchedule::alongside: channel used twice");
      out.channels[c] = segs;
    }
    out.pad_to(std::max(num_samples(), other.num_samples()));
    out.virtual_z = {virtual_z[0] + other.virtual_z[0], virtual_z[1] + other.virtual_z[1]};
    out.detuning_mhz = detuning_mhz != 0.0 ? detuning_mhz : other.detuning_mhz;
    out.label = label + "|" + other.label;
    return out;
  }
};

enum class GateConfig { A, B };
enum class GateKind { geometric, dynamical };

struct GateSpec {
  double theta = kPi / 2;
  double gamma = 0.0;
  double varphi = 0.0;
  GateConfig config = GateConfig::A;
  GateKind kind = GateKind::geometric;

  void validate() const {
    if (!(theta >= 0.0 && theta <= kPi)) throw std::invalid_argument("GateSpec: theta must lie in [0, pi]");
    if (!std::isfinite(gamma) || !std::isfinite(varphi)) throw std::invalid_argument("GateSpec: non-finite angle");
  }
};

struct PulseOptions {
  Channel channel = Channel::xy_a;
  double total_width = kSingleQubitGateWidth;
  double drag = 0.0;
  double anharmonicity_mhz = -200.0;

  /// DRAG is switched on for three-level transmons only.
  static PulseOptions for_qubit(const TransmonParams& q, Channel channel = Channel::xy_a) {
    PulseOptions o;
    o.channel = channel;
    o.anharmonicity_mhz = q.anharmonicity_mhz;
    o.drag = q.levels == 3 ? 1.0 : 0.0;
    return o;
  }
};

/// Truncated Gaussian on [0, w] cut at +-2 sigma (sigma = w/4) with the edge
/// offset removed, scaled so the sampled area equals `area` exactly. The
/// quadrature is -drag * dOmega/dt / alpha, both in angular units.
inline std::pair<Envelope, Envelope> truncated_gaussian_drag(double width, double area, double drag_coef,
                                                             double anharm_mhz, double dt) {
  if (!(width > 0.0)) throw std::invalid_argument("truncated_gaussian_drag: width must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("truncated_gaussian_drag: dt must be positive");
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(width / dt)));
  const double w = dt * static_cast<double>(n);
  const double sigma = w / 4.0;
  const double floor = std::exp(-2.0);
  std::vector<double> f(n), df(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = (static_cast<double>(k) + 0.5) * dt - w / 2.0;
    const double g = std::exp(-x * x / (2.0 * sigma * sigma));
    f[k] = g - floor;
    df[k] = -x / (sigma * sigma) * g;
    sum += f[k];
  }
  const double scale = area / (angular(sum) * dt);
  Envelope in{dt, std::vector<double>(n)}, quad{dt, std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    in.samples[k] = scale * f[k];
    if (drag_coef != 0.0) quad.samples[k] = -drag_coef * scale * df[k] / angular(anharm_mhz);
  }
  return {std::move(in), std::move(quad)};
}

inline PulseSegment gaussian_segment(double width, double area, double phase, const PulseOptions& o, double dt,
                                     std::string tag = {}) {
  auto [in, quad] = truncated_gaussian_drag(width, area, o.drag, o.anharmonicity_mhz, dt);
  PulseSegment s;
  s.envelope = std::move(in);
  if (o.drag != 0.0) s.quadrature = std::move(quad);
  s.phase = phase;
  s.drag_coefficient = o.drag;
  s.area = s.envelope.area();
  s.tag = std::move(tag);
  return s;
}

/// Three-interval loop: areas (theta, pi, pi - theta) with phases
/// (phi - pi/2, phi + gamma +- pi/2, phi - pi/2). Widths scale with area so all
/// intervals share one peak Rabi rate.
inline PulseSchedule geometric_single_qubit(const GateSpec& spec, double total_width = kSingleQubitGateWidth,
                                            double dt = kDefaultDt, PulseOptions opts = {}) {
  spec.validate();
  if (spec.kind != GateKind::geometric)
    throw std::invalid_argument("geometric_single_qubit: spec.kind must be geometric");
  opts.total_width = total_width;
  const double mid = spec.config == GateConfig::A ? kPi / 2 : -kPi / 2;
  const std::array<double, 3> areas{spec.theta, kPi, kPi - spec.theta};
  const std::array<double, 3> phases{spec.varphi - kPi / 2, spec.varphi + spec.gamma + mid, spec.varphi - kPi / 2};
  PulseSchedule s;
  s.dt = dt;
  s.channels[opts.channel] = {};
  for (int k = 0; k < 3; ++k) {
    if (areas[k] < 1e-12) continue;
    const double w = total_width * areas[k] / (2.0 * kPi);
    s.append(opts.channel, gaussian_segment(w, areas[k], phases[k], opts, dt, "geo" + std::to_string(k + 1)));
  }
  s.label = "geometric";
  return s;
}

/// Width of a single resonant pulse with the same peak Rabi rate as the
/// geometric loop of the given total width.
inline double dynamical_width(double rotation_angle, double total_width = kSingleQubitGateWidth) {
  return total_width * std::abs(rotation_angle) / (2.0 * kPi);
}

inline PulseSchedule dynamical_single_qubit(double rotation_angle, double axis_phase, double width,
                                            double dt = kDefaultDt, PulseOptions opts = {}) {
  PulseSchedule s;
  s.dt = dt;
  s.channels[opts.channel] = {};
  if (std::abs(rotation_angle) > 1e-12) {
    const double phase = axis_phase + (rotation_angle < 0.0 ? kPi : 0.0);
    s.append(opts.channel, gaussian_segment(width, std::abs(rotation_angle), phase, opts, dt, "dyn"));
  }
  s.label = "dynamical";
  return s;
}

inline PulseSchedule dynamical_single_qubit(double rotation_angle, double axis_phase) {
  return dynamical_single_qubit(rotation_angle, axis_phase, dynamical_width(rotation_angle));
}

inline PulseSchedule idle_schedule(double duration, double dt = kDefaultDt, Channel channel = Channel::xy_a) {
  PulseSchedule s;
  s.dt = dt;
  s.append(channel, PulseSegment::idle(dt, static_cast<std::size_t>(std::llround(duration / dt))));
  s.label = "I";
  return s;
}

/// cos(gamma) I + i sin(gamma) n.sigma with n = (sin th cos phi, sin th sin phi, cos th).
inline ComplexMatrix target_unitary(const GateSpec& spec) {
  const double nx = std::sin(spec.theta) * std::cos(spec.varphi);
  const double ny = std::sin(spec.theta) * std::sin(spec.varphi);
  const double nz = std::cos(spec.theta);
  const ComplexMatrix ns = nx * sigma_x() + ny * sigma_y() + nz * sigma_z();
  return std::cos(spec.gamma) * identity(2) + kI * std::sin(spec.gamma) * ns;
}

/// exp(-i angle sigma_phi / 2) for an equatorial axis at angle phi.
inline ComplexMatrix rotation_unitary(double angle, double phi) {
  const ComplexMatrix s = std::cos(phi) * sigma_x() + std::sin(phi) * sigma_y();
  return std::cos(angle / 2) * identity(2) - kI * std::sin(angle / 2) * s;
}

// Named gates --------------------------------------------------------------

struct NamedGateStep {
  GateSpec geometric;   // theta = pi/2 loop
  double angle = 0.0;   // dynamical rotation angle
  double axis = 0.0;    // dynamical axis phase
};

inline const std::vector<std::string>& named_gate_names() {
  static const std::vector<std::string> names{"I", "X", "Y", "X/2", "Y/2", "-X/2", "-Y/2", "H", "T"};
  return names;
}

/// Decomposition of a named gate into loop/rotation steps in time order.
/// An empty list is the idle gate.
inline std::vector<NamedGateStep> named_gate_steps(const std::string& name) {
  auto step = [](double gamma, double phi, double angle, double axis) {
    NamedGateStep s;
    s.geometric.theta = kPi / 2;
    s.geometric.gamma = gamma;
    s.geometric.varphi = phi;
    s.angle = angle;
    s.axis = axis;
    return s;
  };
  const NamedGateStep x = step(-kPi / 2, 0.0, kPi, 0.0);
  const NamedGateStep y = step(-kPi / 2, kPi / 2, kPi, kPi / 2);
  const NamedGateStep x2 = step(-kPi / 4, 0.0, kPi / 2, 0.0);
  const NamedGateStep y2 = step(-kPi / 4, kPi / 2, kPi / 2, kPi / 2);
  if (name == "I") return {};
  if (name == "X") return {x};
  if (name == "Y") return {y};
  if (name == "X/2") return {x2};
  if (name == "Y/2") return {y2};
  if (name == "-X/2") return {step(kPi / 4, 0.0, -kPi / 2, 0.0)};
  if (name == "-Y/2") return {step(kPi / 4, kPi / 2, -kPi / 2, kPi / 2)};
  if (name == "H") return {y2, x};
  if (name == "T") return {x, step(-kPi / 2, kPi / 8, kPi, kPi / 8)};
  throw std::invalid_argument("named_gate: unknown gate '" + name + "'");
}

inline ComplexMatrix named_gate_target(const std::string& name) {
  ComplexMatrix u = identity(2);
  for (const auto& s : named_gate_steps(name)) u = target_unitary(s.geometric) * u;
  return u;
}

inline PulseSchedule named_gate(const std::string& name, GateKind kind, GateConfig config = GateConfig::A,
                                double dt = kDefaultDt, const PulseOptions& opts = {}) {
  const auto steps = named_gate_steps(name);
  if (steps.empty()) {
    PulseSchedule s = idle_schedule(opts.total_width, dt, opts.channel);
    s.label = name;
    return s;
  }
  PulseSchedule out;
  out.dt = dt;
  bool first = true;
  for (const auto& st : steps) {
    PulseSchedule part;
    if (kind == GateKind::geometric) {
      GateSpec g = st.geometric;
      g.config = config;
      part = geometric_single_qubit(g, opts.total_width, dt, opts);
    } else {
      part = dynamical_single_qubit(st.angle, st.axis, dynamical_width(st.angle, opts.total_width), dt, opts);
    }
    part.label.clear();
    out = first ? part : out.then(part);
    first = false;
  }
  out.label = name;
  return out;
}

// Parametric CZ ------------------------------------------------------------

struct EffectiveCoupling {
  double g_mhz = 0.0;
  double phase = 0.0;
};

inline double bessel_j1(double x) { return std::cyl_bessel_j(1.0, std::abs(x)) * (x < 0.0 ? -1.0 : 1.0); }

/// Sideband coupling 2 g J1(eps/nu) and its phase -Phi + pi/2.
inline EffectiveCoupling effective_coupling(double g_ab_mhz, const ModulationParams& m) {
  m.validate();
  return {2.0 * g_ab_mhz * bessel_j1(m.amp_mhz / m.freq_mhz), -m.phase + kPi / 2};
}

/// Same with the sqrt(2) matrix element of a^dag b between |11> and |02>.
inline EffectiveCoupling effective_coupling_bosonic(double g_ab_mhz, const ModulationParams& m) {
  EffectiveCoupling c = effective_coupling(g_ab_mhz, m);
  c.g_mhz *= std::sqrt(2.0);
  return c;
}

/// Rising sine^2 edge, flat top, falling sine^2 edge; zero outside [0, length].
inline double burst_envelope(double s, double length, double edge) {
  if (s <= 0.0 || s >= length) return 0.0;
  if (edge <= 0.0) return 1.0;
  if (s < edge) return std::pow(std::sin(kPi * s / (2.0 * edge)), 2);
  if (s > length - edge) return std::pow(std::sin(kPi * (length - s) / (2.0 * edge)), 2);
  return 1.0;
}

/// Fraction of the flat-top coupling delivered on average across one edge.
/// The sideband rate follows J1 of the instantaneous modulation depth.
inline double edge_weight(const ModulationParams& m, double edge) {
  if (edge <= 0.0) return 0.0;
  if (m.amp_mhz <= 0.0) return 0.5;
  const double x = m.amp_mhz / m.freq_mhz;
  const double full = bessel_j1(x);
  constexpr int kNodes = 400;
  double acc = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const double s = (k + 0.5) / kNodes;
    acc += bessel_j1(x * std::pow(std::sin(kPi * s / 2.0), 2));
  }
  return acc / kNodes / full;
}

/// Length of one burst, in ns, for a full |11> <-> |02> transfer at coupling g.
inline double cz_burst_length(const ModulationParams& m, double g_eff_mhz, double edge) {
  if (!(g_eff_mhz > 0.0)) throw std::invalid_argument("parametric_cz_schedule: effective coupling must be positive");
  if (edge < 0.0) throw std::invalid_argument("parametric_cz_schedule: edge must be >= 0");
  const double swap = 1.0 / (2.0 * g_eff_mhz * 1e-3);
  const double flat = swap - 2.0 * edge_weight(m, edge) * edge;
  if (flat < 0.0) throw std::invalid_argument("parametric_cz_schedule: edges longer than the transfer time");
  return flat + 2.0 * edge;
}

/// Two modulation bursts in series on Q_A's frequency. Burst k carries
/// eps e(s) sin(nu t + Phi + k dphi) with t the time since the gate start.
inline PulseSchedule parametric_cz_schedule(const ModulationParams& m, double g_eff_mhz, double delta_phi,
                                            double edge = kDefaultCzEdge, double dt = kDefaultDt, int bursts = 2) {
  m.validate();
  const double length = cz_burst_length(m, g_eff_mhz, edge);
  const std::size_t n = static_cast<std::size_t>(std::ceil(length / dt - 1e-9));
  PulseSchedule s;
  s.dt = dt;
  for (int b = 0; b < bursts; ++b) {
    PulseSegment seg;
    seg.envelope = Envelope::zeros(dt, n);
    seg.phase = m.phase + b * delta_phi;
    seg.tag = "burst" + std::to_string(b + 1);
    for (std::size_t k = 0; k < n; ++k) {
      const double local = (static_cast<double>(k) + 0.5) * dt;
      const double t = static_cast<double>(b * n) * dt + local;
      seg.envelope.samples[k] = m.amp_mhz * burst_envelope(local, length, edge) *
                                std::sin(angular(m.freq_mhz) * t + seg.phase);
    }
    seg.area = seg.envelope.area();
    s.append(Channel::z_a, std::move(seg));
  }
  s.label = "CZ";
  return s;
}

inline ComplexMatrix cz_target_unitary(double gamma) {
  ComplexMatrix u = identity(4);
  u(3, 3) = std::polar(1.0, gamma);
  return u;
}

}  // namespace geoqc
