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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

/// Dense complex linear algebra for the small Hilbert spaces used by the
/// simulator (qubits, qutrits and pairs of them; dimension at most 9).
///
/// Matrices are plain Eigen dynamic matrices. States that carry physical
/// invariants (normalised kets, density matrices) are wrapped in small value
/// types that validate on construction, so a `DensityMatrix` in hand is always
/// Hermitian, unit trace and positive semidefinite to the stated tolerances.
namespace geoqc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

namespace tol {
inline constexpr double kUnitary = 1e-10;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kHermitianInput = 1e-8;
inline constexpr double kDensityHermitian = 1e-10;
inline constexpr double kDensityTrace = 1e-9;
inline constexpr double kDensityEigen = -1e-9;
inline constexpr double kKetNorm = 1e-12;
}  // namespace tol

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

inline double unitarity_error(const ComplexMatrix& u) {
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols()));
}

inline bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kHermitian) {
  return m.rows() == m.cols() && hermiticity_error(m) < tolerance;
}

inline bool is_unitary(const ComplexMatrix& u, double tolerance = tol::kUnitary) {
  return u.rows() == u.cols() && unitarity_error(u) < tolerance;
}

// Pauli operators.
inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

inline ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

inline ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Truncated bosonic lowering operator on `d` levels.
inline ComplexMatrix lowering(Index d) {
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline ComplexMatrix number_operator(Index d) {
  ComplexMatrix n = ComplexMatrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

/// Kronecker product; `a` is the slow (leading) factor.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix tensor(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

/// exp(-i H t) for Hermitian H via the Hermitian eigendecomposition.
inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
  if (h.rows() != h.cols()) throw std::invalid_argument("expm_hermitian: matrix is not square");
  const double err = hermiticity_error(h);
  if (err >= tol::kHermitianInput)
    throw std::invalid_argument("expm_hermitian: matrix is not Hermitian (max |A - A^dag| = " +
                                std::to_string(err) + ")");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const auto& v = es.eigenvectors();
  ComplexVector phases(h.rows());
  for (Index k = 0; k < h.rows(); ++k) phases(k) = std::exp(-kI * es.eigenvalues()(k) * t);
  return v * phases.asDiagonal() * v.adjoint();
}

/// Places a 2x2 operator on the lowest two levels of a d-level system;
/// the remaining levels are left untouched (identity).
inline ComplexMatrix embed(const ComplexMatrix& op2, Index d) {
  if (op2.rows() != 2 || op2.cols() != 2) throw std::invalid_argument("embed: operator must be 2x2");
  if (d < 2) throw std::invalid_argument("embed: target dimension must be >= 2");
  ComplexMatrix out = ComplexMatrix::Identity(d, d);
  out.topLeftCorner(2, 2) = op2;
  return out;
}

/// |Tr(U^dag V)|^2 / d^2, insensitive to global phase.
inline double trace_fidelity(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw std::invalid_argument("trace_fidelity: dimension mismatch");
  const double d = static_cast<double>(u.rows());
  return std::norm((u.adjoint() * v).trace()) / (d * d);
}

class KetState {
 public:
  explicit KetState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    const double err = std::abs(amplitudes_.norm() - 1.0);
    if (amplitudes_.size() == 0 || err > tol::kKetNorm)
      throw std::invalid_argument("KetState: norm deviates from 1 by " + std::to_string(err));
  }

  static KetState basis(Index dim, Index k) {
    if (k < 0 || k >= dim) throw std::invalid_argument("KetState::basis: index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return KetState(std::move(v));
  }

  /// Normalises before validating.
  static KetState normalized(ComplexVector v) {
    const double n = v.norm();
    if (n == 0.0) throw std::invalid_argument("KetState::normalized: zero vector");
    return KetState(v / n);
  }

  const ComplexVector& amplitudes() const { return amplitudes_; }
  Index dim() const { return amplitudes_.size(); }
  ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  ComplexVector amplitudes_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) { validate(); }
  explicit DensityMatrix(const KetState& psi) : m_(psi.projector()) { validate(); }

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

  double population(Index k) const { return m_(k, k).real(); }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  void validate() const {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
    const double herm = hermiticity_error(m_);
    if (herm > tol::kDensityHermitian)
      throw std::invalid_argument("DensityMatrix: not Hermitian (error " + std::to_string(herm) + ")");
    const double tr = std::abs(m_.trace().real() - 1.0);
    if (tr > tol::kDensityTrace)
      throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol::kDensityEigen)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                  std::to_string(es.eigenvalues().minCoeff()));
  }

  ComplexMatrix m_;
};

/// Reduced operator on subsystem `keep`. Works on any square operator whose
/// dimension is the product of `dims`.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const Index> dims, Index keep) {
  const Index total = std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("partial_trace: product of subsystem dimensions does not match operator");
  if (keep < 0 || keep >= static_cast<Index>(dims.size()))
    throw std::invalid_argument("partial_trace: subsystem index out of range");
  Index inner = 1;
  for (std::size_t k = static_cast<std::size_t>(keep) + 1; k < dims.size(); ++k) inner *= dims[k];
  const Index dk = dims[static_cast<std::size_t>(keep)];
  const Index outer = total / (inner * dk);
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i)
    for (Index j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (Index o = 0; o < outer; ++o)
        for (Index n = 0; n < inner; ++n)
          acc += rho((o * dk + i) * inner + n, (o * dk + j) * inner + n);
      out(i, j) = acc;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Index> dims, Index keep) {
  ComplexMatrix r = partial_trace(rho.matrix(), dims, keep);
  return DensityMatrix(0.5 * (r + r.adjoint()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Index> dims, Index keep) {
  std::vector<Index> d(dims);
  return partial_trace(rho, std::span<const Index>(d), keep);
}

}  // namespace geoqc
