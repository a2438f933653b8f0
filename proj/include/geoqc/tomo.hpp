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

#include "geoqc/evolve.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cassert>
#include <functional>
#include <iostream>
#include <random>

/// State and process tomography, process fidelity and readout modelling.
///
/// Process matrices use the operator basis {I, X, -iY, Z} on each qubit,
/// tensored lexicographically with qubit A as the most significant factor.
namespace geoqc {

inline Index qubit_dim(int n_qubits) { return Index{1} << n_qubits; }

inline Index pow4(int n) { return Index{1} << (2 * n); }

/// The 4^n process basis operators {I, X, -iY, Z}^(x n).
inline std::vector<ComplexMatrix> chi_basis(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 2) throw std::invalid_argument("chi_basis: 1 or 2 qubits supported");
  const std::vector<ComplexMatrix> one{identity(2), sigma_x(), ComplexMatrix(-kI * sigma_y()), sigma_z()};
  if (n_qubits == 1) return one;
  std::vector<ComplexMatrix> out;
  for (const auto& a : one)
    for (const auto& b : one) out.push_back(tensor(a, b));
  return out;
}

inline std::vector<std::string> chi_labels(int n_qubits) {
  const std::vector<std::string> one{"I", "X", "Y", "Z"};
  if (n_qubits == 1) return one;
  std::vector<std::string> out;
  for (const auto& a : one)
    for (const auto& b : one) out.push_back(a + b);
  return out;
}

struct ProcessMatrix {
  int n_qubits = 1;
  ComplexMatrix chi;

  double trace() const { return chi.trace().real(); }

  void validate(bool trace_preserving = true) const {
    if (chi.rows() != pow4(n_qubits) || chi.cols() != chi.rows())
      throw std::invalid_argument("ProcessMatrix: chi must be 4^n x 4^n");
    if (hermiticity_error(chi) > 1e-8) throw std::invalid_argument("ProcessMatrix: chi is not Hermitian");
    if (trace_preserving && std::abs(trace() - 1.0) > 1e-6)
      throw std::invalid_argument("ProcessMatrix: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (chi + chi.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-6) throw std::invalid_argument("ProcessMatrix: chi is not positive");
  }
};

inline int qubits_for_dim(Index d) {
  if (d == 2) return 1;
  if (d == 4) return 2;
  throw std::invalid_argument("tomography: dimension must be 2 or 4");
}

/// chi of rho -> U rho U^dag: chi = e e^dag with e_m = Tr(E_m^dag U) / d.
inline ProcessMatrix chi_from_unitary(const ComplexMatrix& u) {
  const int n = qubits_for_dim(u.rows());
  const auto basis = chi_basis(n);
  const double d = static_cast<double>(u.rows());
  ComplexVector e(static_cast<Index>(basis.size()));
  for (std::size_t m = 0; m < basis.size(); ++m) e(static_cast<Index>(m)) = (basis[m].adjoint() * u).trace() / d;
  return {n, e * e.adjoint()};
}

/// Expands a superoperator S = sum chi_mn E_m kron conj(E_n); the terms are
/// orthogonal with norm d^2, so each coefficient is a single overlap.
inline ProcessMatrix chi_from_superop(const ComplexMatrix& s) {
  const Index d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
  const int n = qubits_for_dim(d);
  const auto basis = chi_basis(n);
  const Index k = static_cast<Index>(basis.size());
  const double norm = static_cast<double>(d * d);
  ComplexMatrix chi(k, k);
  for (Index m = 0; m < k; ++m)
    for (Index q = 0; q < k; ++q) {
      const ComplexMatrix t = tensor(basis[static_cast<std::size_t>(m)], basis[static_cast<std::size_t>(q)].conjugate());
      chi(m, q) = (t.adjoint() * s).trace() / norm;
    }
  return {n, chi};
}

/// Single-qubit QPT input states |0>, |1>, |+>, |-i>.
inline std::vector<ComplexMatrix> qpt_input_states(int n_qubits) {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<ComplexVector> kets(4, ComplexVector(2));
  kets[0] << 1.0, 0.0;
  kets[1] << 0.0, 1.0;
  kets[2] << r, r;
  kets[3] << r, Complex(0.0, -r);
  std::vector<ComplexMatrix> one;
  for (const auto& k : kets) one.push_back(k * k.adjoint());
  if (n_qubits == 1) return one;
  if (n_qubits != 2) throw std::invalid_argument("qpt_input_states: 1 or 2 qubits supported");
  std::vector<ComplexMatrix> out;
  for (const auto& a : one)
    for (const auto& b : one) out.push_back(tensor(a, b));
  return out;
}

/// Reconstructs chi from the outputs of the standard input states by
/// inverting the input transfer matrix. Exact for any linear channel.
inline ProcessMatrix qpt_from_outputs(const std::vector<ComplexMatrix>& outputs, int n_qubits) {
  const auto inputs = qpt_input_states(n_qubits);
  if (outputs.size() != inputs.size())
    throw std::invalid_argument("qpt: expected " + std::to_string(inputs.size()) + " output states");
  const Index d = qubit_dim(n_qubits);
  const Index k = d * d;
  ComplexMatrix vin(k, k), vout(k, k);
  for (Index c = 0; c < k; ++c)
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        vin(i * d + j, c) = inputs[static_cast<std::size_t>(c)](i, j);
        vout(i * d + j, c) = outputs[static_cast<std::size_t>(c)](i, j);
      }
  Eigen::FullPivLU<ComplexMatrix> lu(vin);
  assert(lu.isInvertible());
  const ComplexMatrix s = vout * lu.inverse();
  ProcessMatrix pm = chi_from_superop(s);
  pm.chi = 0.5 * (pm.chi + pm.chi.adjoint());
  return pm;
}

using ChannelRunner = std::function<ComplexMatrix(const ComplexMatrix&)>;

inline ProcessMatrix qpt(const ChannelRunner& runner, int n_qubits) {
  const auto inputs = qpt_input_states(n_qubits);
  std::vector<ComplexMatrix> outputs;
  outputs.reserve(inputs.size());
  for (const auto& rho : inputs) outputs.push_back(runner(rho));
  return qpt_from_outputs(outputs, n_qubits);
}

inline ProcessMatrix qpt(const QuantumChannel& ch) {
  return qpt([&](const ComplexMatrix& rho) { return ch.apply(rho); }, qubits_for_dim(ch.dim()));
}

/// Re Tr(chi_exp chi_ideal), clamped to [0, 1].
inline double process_fidelity(const ProcessMatrix& exp, const ProcessMatrix& ideal) {
  if (exp.n_qubits != ideal.n_qubits || exp.chi.rows() != ideal.chi.rows())
    throw std::invalid_argument("process_fidelity: dimension mismatch");
  const double f = (exp.chi * ideal.chi).trace().real();
  if (f < -1e-6 || f > 1.0 + 1e-6) std::clog << "geoqc: process fidelity " << f << " clamped to [0, 1]\n";
  return std::clamp(f, 0.0, 1.0);
}

/// Average gate fidelity from process fidelity: (d F_p + 1) / (d + 1).
inline double average_from_process_fidelity(double f_p, Index d) {
  const double dd = static_cast<double>(d);
  return (dd * f_p + 1.0) / (dd + 1.0);
}

inline nlohmann::json chi_to_json(const ProcessMatrix& pm) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Index r = 0; r < pm.chi.rows(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
    for (Index c = 0; c < pm.chi.cols(); ++c) {
      rr.push_back(pm.chi(r, c).real());
      ir.push_back(pm.chi(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"n_qubits", pm.n_qubits}, {"labels", chi_labels(pm.n_qubits)}, {"re", re}, {"im", im}};
}

// ---------------------------------------------------------------------------
// State tomography

/// Pre-rotations {I, X/2, Y/2, X}^(x n) in lexicographic order.
inline std::vector<ComplexMatrix> tomography_rotations(int n_qubits) {
  const std::vector<ComplexMatrix> one{identity(2), rotation_unitary(kPi / 2, 0.0), rotation_unitary(kPi / 2, kPi / 2),
                                       rotation_unitary(kPi, 0.0)};
  if (n_qubits == 1) return one;
  if (n_qubits != 2) throw std::invalid_argument("tomography_rotations: 1 or 2 qubits supported");
  std::vector<ComplexMatrix> out;
  for (const auto& a : one)
    for (const auto& b : one) out.push_back(tensor(a, b));
  return out;
}

/// Hermitian operator basis used to parametrise rho: Paulis {I, X, Y, Z}^(x n).
inline std::vector<ComplexMatrix> pauli_basis(int n_qubits) {
  const std::vector<ComplexMatrix> one{identity(2), sigma_x(), sigma_y(), sigma_z()};
  if (n_qubits == 1) return one;
  std::vector<ComplexMatrix> out;
  for (const auto& a : one)
    for (const auto& b : one) out.push_back(tensor(a, b));
  return out;
}

/// Euclidean projection of a real vector onto the probability simplex.
inline RealVector project_to_simplex(const RealVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, shift = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) shift = t;
  }
  return (v.array() - shift).max(0.0).matrix();
}

/// Nearest (Frobenius) unit-trace positive semidefinite matrix.
inline ComplexMatrix project_to_density(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  const RealVector w = project_to_simplex(es.eigenvalues());
  const ComplexMatrix out = es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

/// Computational-basis outcome probabilities after each pre-rotation.
inline std::vector<RealVector> tomography_probabilities(const ComplexMatrix& rho) {
  const int n = qubits_for_dim(rho.rows());
  std::vector<RealVector> out;
  for (const auto& u : tomography_rotations(n)) {
    const ComplexMatrix r = u * rho * u.adjoint();
    out.push_back(r.diagonal().real().cwiseMax(0.0));
  }
  return out;
}

/// Linear inversion of pre-rotated outcome distributions followed by the
/// projection onto density matrices.
inline DensityMatrix state_tomography(const std::vector<RealVector>& probabilities, int n_qubits) {
  const auto rotations = tomography_rotations(n_qubits);
  if (probabilities.size() != rotations.size())
    throw std::invalid_argument("state_tomography: expected " + std::to_string(rotations.size()) +
                                " pre-rotation distributions, got " + std::to_string(probabilities.size()));
  const Index d = qubit_dim(n_qubits);
  const auto paulis = pauli_basis(n_qubits);
  const Index np = static_cast<Index>(paulis.size());
  const Index rows = static_cast<Index>(rotations.size()) * d;
  RealMatrix a(rows, np);
  RealVector b(rows);
  for (std::size_t r = 0; r < rotations.size(); ++r) {
    if (probabilities[r].size() != d) throw std::invalid_argument("state_tomography: distribution size mismatch");
    for (Index k = 0; k < d; ++k) {
      const Index row = static_cast<Index>(r) * d + k;
      const ComplexMatrix m = rotations[r].adjoint().col(k) * rotations[r].adjoint().col(k).adjoint();
      for (Index p = 0; p < np; ++p)
        a(row, p) = (paulis[static_cast<std::size_t>(p)] * m).trace().real() / static_cast<double>(d);
      b(row) = probabilities[r](k);
    }
  }
  const RealVector c = a.colPivHouseholderQr().solve(b);
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (Index p = 0; p < np; ++p) rho += c(p) * paulis[static_cast<std::size_t>(p)] / static_cast<double>(d);
  return DensityMatrix(project_to_density(rho));
}

// ---------------------------------------------------------------------------
// Readout

/// Assignment matrix: columns are prepared basis states, rows are outcomes.
struct ReadoutModel {
  RealMatrix matrix = RealMatrix::Identity(4, 4);

  static ReadoutModel ideal(int n_qubits) { return {RealMatrix::Identity(qubit_dim(n_qubits), qubit_dim(n_qubits))}; }
  static ReadoutModel from_device(const DeviceModel& d) { return {d.readout_matrix}; }

  void validate() const {
    if (matrix.rows() != matrix.cols() || (matrix.rows() != 2 && matrix.rows() != 4))
      throw std::invalid_argument("ReadoutModel: matrix must be 2x2 or 4x4");
    for (Index c = 0; c < matrix.cols(); ++c)
      if (std::abs(matrix.col(c).sum() - 1.0) > 1e-3)
        throw std::invalid_argument("ReadoutModel: column " + std::to_string(c) + " does not sum to 1");
    if (matrix.minCoeff() < 0.0 || matrix.maxCoeff() > 1.0)
      throw std::invalid_argument("ReadoutModel: entries must lie in [0, 1]");
  }

  /// Single-qubit assignment matrix of `qubit` (0 = A) with the other qubit
  /// prepared in |0>.
  ReadoutModel marginal(int qubit) const {
    if (matrix.rows() != 4) throw std::invalid_argument("ReadoutModel::marginal: needs a two-qubit matrix");
    RealMatrix m = RealMatrix::Zero(2, 2);
    for (int prep = 0; prep < 2; ++prep) {
      const Index col = qubit == 0 ? 2 * prep : prep;
      for (Index out = 0; out < 4; ++out) m(qubit == 0 ? out / 2 : out % 2, prep) += matrix(out, col);
    }
    return {m};
  }
};

inline RealVector apply_readout_model(const ReadoutModel& r, const RealVector& p_true) {
  if (p_true.size() != r.matrix.cols()) throw std::invalid_argument("apply_readout_model: size mismatch");
  return r.matrix * p_true;
}

struct ReadoutCorrection {
  RealVector probabilities;
  bool negative = false;
};

/// R^-1 p; components below -1e-3 set `negative` (a statistical noise flag).
inline ReadoutCorrection readout_correct(const ReadoutModel& r, const RealVector& p_meas) {
  if (p_meas.size() != r.matrix.cols()) throw std::invalid_argument("readout_correct: size mismatch");
  Eigen::FullPivLU<RealMatrix> lu(r.matrix);
  if (!lu.isInvertible()) throw std::domain_error("readout_correct: singular assignment matrix");
  ReadoutCorrection out{lu.solve(p_meas)};
  out.negative = out.probabilities.minCoeff() < -1e-3;
  return out;
}

/// Multinomial resampling of a distribution with `shots` draws, as
/// frequencies. shots == 0 returns the input unchanged.
inline RealVector sample_frequencies(const RealVector& p, std::uint64_t shots, std::mt19937_64& rng) {
  if (shots == 0) return p;
  RealVector out = RealVector::Zero(p.size());
  std::uint64_t left = shots;
  double mass = 1.0;
  for (Index k = 0; k < p.size() && left > 0; ++k) {
    const double q = k + 1 == p.size() ? 1.0 : std::clamp(std::max(0.0, p(k)) / std::max(mass, 1e-300), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> bin(left, q);
    const std::uint64_t n = bin(rng);
    out(k) = static_cast<double>(n) / static_cast<double>(shots);
    left -= n;
    mass -= std::max(0.0, p(k));
  }
  return out;
}

/// Measurement layer for tomography: readout assignment, optional shot
/// noise and optional inversion of the assignment matrix.
struct MeasurementModel {
  ReadoutModel readout = ReadoutModel::ideal(1);
  bool apply_readout = false;
  bool correct_readout = false;
  std::uint64_t shots = 0;

  RealVector measure(const RealVector& p, std::mt19937_64& rng) const {
    RealVector q = apply_readout ? apply_readout_model(readout, p) : p;
    q = sample_frequencies(q, shots, rng);
    if (correct_readout) q = readout_correct(readout, q).probabilities;
    return q;
  }
};

/// State tomography of rho through the measurement layer.
inline DensityMatrix measure_state(const ComplexMatrix& rho, const MeasurementModel& meas, std::mt19937_64& rng) {
  auto probs = tomography_probabilities(rho);
  for (auto& p : probs) p = meas.measure(p, rng);
  return state_tomography(probs, qubits_for_dim(rho.rows()));
}

/// Full tomographic QPT: each output state is reconstructed from simulated
/// measurement data before the chi inversion.
inline ProcessMatrix qpt_tomographic(const ChannelRunner& runner, int n_qubits, const MeasurementModel& meas,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto inputs = qpt_input_states(n_qubits);
  std::vector<ComplexMatrix> outputs;
  for (const auto& rho : inputs) outputs.push_back(measure_state(runner(rho), meas, rng).matrix());
  return qpt_from_outputs(outputs, n_qubits);
}

}  // namespace geoqc
