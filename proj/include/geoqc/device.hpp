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

#include "geoqc/hilbert.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

/// Two-transmon device model and Hamiltonian builders.
///
/// Units are fixed across the library: frequencies are f = omega / 2pi in MHz
/// (qubit frequencies in GHz where the name says so), times in ns, coherence
/// times in us. Every Hamiltonian returned here is already in angular units
/// of rad/ns, i.e. scaled by `angular()`.
namespace geoqc {

/// rad/ns for a frequency given as f = omega / 2pi in MHz.
inline constexpr double angular(double mhz) { return 2.0 * kPi * 1e-3 * mhz; }

struct TransmonParams {
  double freq_ghz = 5.0;
  double anharmonicity_mhz = -200.0;
  double t1_us = std::numeric_limits<double>::infinity();
  double t2_star_us = std::numeric_limits<double>::infinity();
  int levels = 2;

  void validate() const {
    if (!(anharmonicity_mhz < 0.0))
      throw std::invalid_argument("TransmonParams: anharmonicity must be negative");
    if (!(t1_us > 0.0)) throw std::invalid_argument("TransmonParams: t1 must be positive");
    if (!(t2_star_us > 0.0)) throw std::invalid_argument("TransmonParams: t2_star must be positive");
    if (std::isfinite(t2_star_us) && t2_star_us > 2.0 * t1_us)
      throw std::invalid_argument("TransmonParams: t2_star exceeds 2*t1 (unphysical)");
    if (!std::isfinite(t2_star_us) && std::isfinite(t1_us))
      throw std::invalid_argument("TransmonParams: t2_star exceeds 2*t1 (unphysical)");
    if (levels != 2 && levels != 3) throw std::invalid_argument("TransmonParams: levels must be 2 or 3");
  }

  /// 1/T1 in 1/ns.
  double relaxation_rate() const { return std::isfinite(t1_us) ? 1.0 / (t1_us * 1e3) : 0.0; }

  /// Pure dephasing rate 1/T_phi = 1/T2* - 1/(2 T1), in 1/ns.
  double dephasing_rate() const {
    const double inv_t2 = std::isfinite(t2_star_us) ? 1.0 / (t2_star_us * 1e3) : 0.0;
    const double rate = inv_t2 - 0.5 * relaxation_rate();
    return rate < 0.0 && rate > -1e-15 ? 0.0 : rate;
  }
};

struct ModulationParams {
  double amp_mhz = 0.0;   // epsilon / 2pi
  double freq_mhz = 1.0;  // nu / 2pi
  double phase = 0.0;     // Phi

  void validate() const {
    if (!(amp_mhz >= 0.0)) throw std::invalid_argument("ModulationParams: amplitude must be >= 0");
    if (!(freq_mhz > 0.0)) throw std::invalid_argument("ModulationParams: frequency must be > 0");
  }
};

struct DeviceModel {
  TransmonParams qubit_a;
  TransmonParams qubit_b;
  double g_ab_mhz = 0.0;
  Eigen::Matrix2d flux_crosstalk = Eigen::Matrix2d::Identity();
  Eigen::Matrix4d readout_matrix = Eigen::Matrix4d::Identity();

  void validate() const {
    qubit_a.validate();
    qubit_b.validate();
    if (std::abs(flux_crosstalk(0, 0) - 1.0) > 1e-12 || std::abs(flux_crosstalk(1, 1) - 1.0) > 1e-12)
      throw std::invalid_argument("DeviceModel: flux crosstalk matrix must have unit diagonal");
    for (int c = 0; c < 4; ++c) {
      if (std::abs(readout_matrix.col(c).sum() - 1.0) > 1e-3)
        throw std::invalid_argument("DeviceModel: readout matrix column " + std::to_string(c) +
                                    " does not sum to 1");
      for (int r = 0; r < 4; ++r)
        if (readout_matrix(r, c) < 0.0 || readout_matrix(r, c) > 1.0)
          throw std::invalid_argument("DeviceModel: readout matrix entries must lie in [0, 1]");
    }
  }

  /// Operating-point parameters of the two-qubit reference device.
  static DeviceModel reference() {
    DeviceModel d;
    d.qubit_a = {4.6019, -202.0, 20.5, 1.73, 2};
    d.qubit_b = {5.0810, -190.0, 26.1, 4.86, 2};
    d.g_ab_mhz = 16.68;
    d.flux_crosstalk << 1.0, -0.0759, 0.0800, 1.0;
    d.readout_matrix << 0.9918, 0.1058, 0.1279, 0.0131,  //
        0.0031, 0.8905, 0.0005, 0.1137,                  //
        0.0051, 0.0006, 0.8686, 0.0890,                  //
        0.0000, 0.0032, 0.0030, 0.7842;
    return d;
  }

  /// Same device with decoherence switched off.
  DeviceModel without_decoherence() const {
    DeviceModel d = *this;
    for (auto* q : {&d.qubit_a, &d.qubit_b}) {
      q->t1_us = std::numeric_limits<double>::infinity();
      q->t2_star_us = std::numeric_limits<double>::infinity();
    }
    return d;
  }

  DeviceModel with_levels(int levels) const {
    DeviceModel d = *this;
    d.qubit_a.levels = levels;
    d.qubit_b.levels = levels;
    return d;
  }
};

/// Resonant drive in the frame of the drive. `amplitude_mhz` is the complex
/// Rabi rate Omega e^{i phi} (with any DRAG quadrature already folded in):
///
///   H = 1/2 (c* |0><1| + c |1><0|) + Delta |1><1|
///
/// so phi = 0 drives about x and phi = pi/2 about y. With three levels the
/// |1>-|2> transition carries the sqrt(2) matrix element and |2> sits at
/// 2 Delta + alpha.
inline ComplexMatrix drive_hamiltonian(const TransmonParams& q, Complex amplitude_mhz, double detuning_mhz) {
  if (q.levels != 2 && q.levels != 3) throw std::invalid_argument("drive_hamiltonian: levels must be 2 or 3");
  const Index d = q.levels;
  const Complex c = angular(1.0) * amplitude_mhz;
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  h(0, 1) = 0.5 * std::conj(c);
  h(1, 0) = 0.5 * c;
  h(1, 1) = angular(detuning_mhz);
  if (d == 3) {
    h(1, 2) = std::sqrt(2.0) * 0.5 * std::conj(c);
    h(2, 1) = std::sqrt(2.0) * 0.5 * c;
    h(2, 2) = angular(2.0 * detuning_mhz + q.anharmonicity_mhz);
  }
  return h;
}

inline ComplexMatrix drive_hamiltonian(const TransmonParams& q, double omega_mhz, double phi, double detuning_mhz) {
  return drive_hamiltonian(q, std::polar(omega_mhz, phi), detuning_mhz);
}

/// Operators on the |a b> product space of the pair (qubit A is the slow index).
struct PairOperators {
  Index da = 3, db = 3;
  ComplexMatrix a, b, na, nb;

  PairOperators(Index dim_a, Index dim_b) : da(dim_a), db(dim_b) {
    a = tensor(lowering(da), identity(db));
    b = tensor(identity(da), lowering(db));
    na = a.adjoint() * a;
    nb = b.adjoint() * b;
  }

  Index dim() const { return da * db; }
  Index index(Index level_a, Index level_b) const { return level_a * db + level_b; }
};

/// Static part of the pair Hamiltonian in the doubly rotating frame:
/// anharmonicities only.
inline ComplexMatrix pair_anharmonic_terms(const DeviceModel& d, const PairOperators& ops) {
  const ComplexMatrix id = identity(ops.dim());
  return angular(0.5 * d.qubit_a.anharmonicity_mhz) * ops.na * (ops.na - id) +
         angular(0.5 * d.qubit_b.anharmonicity_mhz) * ops.nb * (ops.nb - id);
}

/// Pair Hamiltonian at time t (ns) for a given instantaneous frequency offset
/// of qubit A, in the frame rotating at each qubit's mean frequency.
inline ComplexMatrix coupled_hamiltonian(const DeviceModel& d, const PairOperators& ops, double detuning_a_mhz,
                                         double t_ns) {
  const double delta_ab = angular(1e3 * (d.qubit_a.freq_ghz - d.qubit_b.freq_ghz));
  const ComplexMatrix exchange = angular(d.g_ab_mhz) * std::exp(kI * delta_ab * t_ns) * ops.a.adjoint() * ops.b;
  return pair_anharmonic_terms(d, ops) + angular(detuning_a_mhz) * ops.na + exchange + exchange.adjoint();
}

/// Pair Hamiltonian with A's frequency modulated as eps sin(nu t + Phi).
/// Both transmons are truncated to three levels.
inline ComplexMatrix coupled_hamiltonian(const DeviceModel& d, const ModulationParams& m, double t_ns) {
  m.validate();
  const PairOperators ops(3, 3);
  const double offset = m.amp_mhz * std::sin(angular(m.freq_mhz) * t_ns + m.phase);
  return coupled_hamiltonian(d, ops, offset, t_ns);
}

/// Amplitude damping sqrt(1/T1) a and pure dephasing sqrt(1/(2 T_phi)) 2n,
/// rates in 1/ns. Zero-rate channels are omitted.
inline std::vector<ComplexMatrix> collapse_operators(const TransmonParams& q) {
  q.validate();
  const Index d = q.levels;
  std::vector<ComplexMatrix> ops;
  if (const double g1 = q.relaxation_rate(); g1 > 0.0) ops.push_back(std::sqrt(g1) * lowering(d));
  if (const double gp = q.dephasing_rate(); gp > 0.0) ops.push_back(std::sqrt(gp / 2.0) * 2.0 * number_operator(d));
  return ops;
}

/// Always-on ZZ rate of |11> from level repulsion with |02> and |20>, in MHz.
inline double zz_rate(const DeviceModel& d) {
  const double delta = 1e3 * (d.qubit_a.freq_ghz - d.qubit_b.freq_ghz);
  const double aa = d.qubit_a.anharmonicity_mhz;
  const double ab = d.qubit_b.anharmonicity_mhz;
  const double den1 = delta - aa;
  const double den2 = delta + ab;
  const double scale = std::max({std::abs(delta), std::abs(aa), std::abs(ab), 1.0});
  if (std::abs(den1) < 1e-9 * scale || std::abs(den2) < 1e-9 * scale)
    throw std::domain_error("zz_rate: qubit detuning straddles an anharmonic resonance (degenerate denominator)");
  return 2.0 * d.g_ab_mhz * d.g_ab_mhz * (aa + ab) / (den1 * den2);
}

/// Bias commands that realise the intended frequency shifts through the
/// flux crosstalk matrix: solves M x = intended.
inline Eigen::Vector2d flux_orthogonalize(const DeviceModel& d, const Eigen::Vector2d& intended) {
  const Eigen::Matrix2d& m = d.flux_crosstalk;
  const double det = m.determinant();
  if (std::abs(det) < 1e-12) throw std::domain_error("flux_orthogonalize: crosstalk matrix is singular");
  return m.inverse() * intended;
}

}  // namespace geoqc
