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

#include "geoqc/pulses.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <random>
#include <unordered_map>

/// One- and two-qubit Clifford groups.
///
/// C1 ships as a fixed table of physical-gate decompositions. C2 is
/// enumerated from C1 x C1 layers interleaved with CZ, keyed by the
/// symplectic tableau so that lookups ignore global phase.
namespace geoqc {

/// Product of named gates applied in the listed order.
inline ComplexMatrix sequence_unitary(const std::vector<std::string>& gates) {
  ComplexMatrix u = identity(2);
  for (const auto& g : gates) u = named_gate_target(g) * u;
  return u;
}

inline bool equal_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b, double tol = 1e-9) {
  return a.rows() == b.rows() && 1.0 - trace_fidelity(a, b) < tol;
}

struct CliffordElement {
  int n_qubits = 1;
  ComplexMatrix matrix;
  std::vector<std::string> decomposition;
};

/// The 24 single-qubit Cliffords over {I, X, Y, X/2, Y/2, -X/2, -Y/2};
/// 45 physical gates in total, 1.875 on average.
class CliffordGroup1 {
 public:
  static const CliffordGroup1& instance() {
    static const CliffordGroup1 g;
    return g;
  }

  std::size_t size() const { return elements_.size(); }
  const CliffordElement& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<CliffordElement>& elements() const { return elements_; }

  /// Index of the element equal to u up to global phase.
  std::size_t find(const ComplexMatrix& u) const {
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if (equal_up_to_phase(elements_[i].matrix, u, 1e-6)) return i;
    throw std::invalid_argument("CliffordGroup1::find: not a Clifford");
  }

  std::size_t multiply(std::size_t second, std::size_t first) const { return mult_[second][first]; }
  std::size_t inverse(std::size_t i) const { return inv_[i]; }

  double mean_gate_count() const {
    double n = 0.0;
    for (const auto& e : elements_) n += static_cast<double>(e.decomposition.size());
    return n / static_cast<double>(elements_.size());
  }

 private:
  CliffordGroup1() {
    const std::vector<std::vector<std::string>> table{
        {"I"},          {"X"},          {"Y"},          {"Y", "X"},
        {"X/2", "Y/2"}, {"X/2", "-Y/2"}, {"-X/2", "Y/2"}, {"-X/2", "-Y/2"},
        {"Y/2", "X/2"}, {"Y/2", "-X/2"}, {"-Y/2", "X/2"}, {"-Y/2", "-X/2"},
        {"X/2"},        {"-X/2"},       {"Y/2"},        {"-Y/2"},
        {"-X/2", "Y/2", "X/2"},         {"-X/2", "-Y/2", "X/2"},
        {"X", "Y/2"},   {"X", "-Y/2"},  {"Y", "X/2"},   {"Y", "-X/2"},
        {"X/2", "Y/2", "X/2"},          {"-X/2", "Y/2", "-X/2"}};
    for (const auto& d : table) elements_.push_back({1, sequence_unitary(d), d});
    const std::size_t n = elements_.size();
    mult_.assign(n, std::vector<std::size_t>(n));
    inv_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) mult_[a][b] = find(elements_[a].matrix * elements_[b].matrix);
    for (std::size_t a = 0; a < n; ++a) inv_[a] = find(elements_[a].matrix.adjoint());
  }

  std::vector<CliffordElement> elements_;
  std::vector<std::vector<std::size_t>> mult_;
  std::vector<std::size_t> inv_;
};

// ---------------------------------------------------------------------------
// Two-qubit Paulis and tableaux

/// i^phase X^x Z^z on two qubits; bit 1 of x and z is qubit A.
struct Pauli2 {
  std::uint8_t x = 0, z = 0, phase = 0;

  friend Pauli2 operator*(Pauli2 a, Pauli2 b) {
    const int swaps = std::popcount(static_cast<unsigned>(a.z & b.x));
    return {static_cast<std::uint8_t>(a.x ^ b.x), static_cast<std::uint8_t>(a.z ^ b.z),
            static_cast<std::uint8_t>((a.phase + b.phase + 2 * swaps) & 3)};
  }
  bool operator==(const Pauli2&) const = default;

  ComplexMatrix matrix() const {
    auto one = [](bool x, bool z) {
      ComplexMatrix m = identity(2);
      if (x) m = sigma_x() * m;
      if (z) m = m * sigma_z();
      return m;
    };
    const ComplexMatrix xz = tensor(one(x & 2, z & 2), one(x & 1, z & 1));
    static const Complex ip[4] = {1.0, kI, -1.0, -kI};
    return ip[phase] * xz;
  }
};

/// Images of X_A, Z_A, X_B, Z_B under conjugation U P U^dag.
struct Tableau2 {
  std::array<Pauli2, 4> image;

  static Tableau2 identity() {
    return {{Pauli2{2, 0, 0}, Pauli2{0, 2, 0}, Pauli2{1, 0, 0}, Pauli2{0, 1, 0}}};
  }

  Pauli2 apply(Pauli2 p) const {
    Pauli2 out{0, 0, p.phase};
    if (p.x & 2) out = out * image[0];
    if (p.x & 1) out = out * image[2];
    if (p.z & 2) out = out * image[1];
    if (p.z & 1) out = out * image[3];
    return out;
  }

  /// Tableau of (this unitary) * (first).
  Tableau2 after(const Tableau2& first) const {
    Tableau2 t;
    for (int k = 0; k < 4; ++k) t.image[static_cast<std::size_t>(k)] = apply(first.image[static_cast<std::size_t>(k)]);
    return t;
  }

  std::uint32_t key() const {
    std::uint32_t k = 0;
    for (const auto& p : image) k = (k << 6) | (static_cast<std::uint32_t>(p.x) << 4) | (p.z << 2) | p.phase;
    return k;
  }

  static Tableau2 from_unitary(const ComplexMatrix& u) {
    const std::array<Pauli2, 4> gens = identity().image;
    Tableau2 t;
    for (std::size_t g = 0; g < 4; ++g) {
      const ComplexMatrix m = u * gens[g].matrix() * u.adjoint();
      bool found = false;
      for (std::uint8_t x = 0; x < 4 && !found; ++x)
        for (std::uint8_t z = 0; z < 4 && !found; ++z) {
          const Complex c = (Pauli2{x, z, 0}.matrix().adjoint() * m).trace() / 4.0;
          if (std::abs(c) < 0.5) continue;
          if (std::abs(std::abs(c) - 1.0) > 1e-6) throw std::invalid_argument("Tableau2: not a Clifford");
          const int ph = static_cast<int>(std::lround(std::arg(c) / (kPi / 2)));
          t.image[g] = Pauli2{x, z, static_cast<std::uint8_t>(((ph % 4) + 4) % 4)};
          found = true;
        }
      if (!found) throw std::invalid_argument("Tableau2: not a Clifford");
    }
    return t;
  }
};

inline ComplexMatrix cz_matrix() { return cz_target_unitary(kPi); }

/// Single-qubit Clifford pair applied in parallel (index into C1).
struct CliffordLayer {
  std::size_t a = 0, b = 0;
  bool operator==(const CliffordLayer&) const = default;
};

/// A two-qubit Clifford as layers[0], CZ, layers[1], CZ, ... in time order.
struct Clifford2Decomposition {
  std::vector<CliffordLayer> layers;
  int cz_count() const { return static_cast<int>(layers.size()) - 1; }
};

/// The 11520-element two-qubit Clifford group (modulo phase). Elements are
/// found breadth-first by CZ count, so every decomposition uses the minimal
/// number of CZ gates: 576 / 5184 / 5184 / 576 elements with 0..3 CZs.
class CliffordGroup2 {
 public:
  static const CliffordGroup2& instance() {
    static const CliffordGroup2 g;
    return g;
  }

  std::size_t size() const { return decomps_.size(); }
  const Clifford2Decomposition& decomposition(std::size_t i) const { return decomps_[i]; }
  const Tableau2& tableau(std::size_t i) const { return tableaux_[i]; }

  ComplexMatrix matrix(std::size_t i) const { return decomposition_unitary(decomps_[i]); }

  CliffordElement element(std::size_t i) const {
    CliffordElement e{2, matrix(i), {}};
    const auto& c1 = CliffordGroup1::instance();
    const auto& layers = decomps_[i].layers;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (l) e.decomposition.push_back("CZ");
      for (const auto& g : c1[layers[l].a].decomposition) e.decomposition.push_back("A:" + g);
      for (const auto& g : c1[layers[l].b].decomposition) e.decomposition.push_back("B:" + g);
    }
    return e;
  }

  static ComplexMatrix decomposition_unitary(const Clifford2Decomposition& d) {
    const auto& c1 = CliffordGroup1::instance();
    ComplexMatrix u = ComplexMatrix::Identity(4, 4);
    for (std::size_t l = 0; l < d.layers.size(); ++l) {
      if (l) u = cz_matrix() * u;
      u = tensor(c1[d.layers[l].a].matrix, c1[d.layers[l].b].matrix) * u;
    }
    return u;
  }

  std::size_t find(const Tableau2& t) const {
    const auto it = index_.find(t.key());
    if (it == index_.end()) throw std::invalid_argument("CliffordGroup2::find: not a Clifford");
    return it->second;
  }
  std::size_t find(const ComplexMatrix& u) const { return find(Tableau2::from_unitary(u)); }

  std::size_t inverse(std::size_t i) const { return find(matrix(i).adjoint()); }

  std::size_t count_with_cz(int n) const {
    std::size_t c = 0;
    for (const auto& d : decomps_) c += d.cz_count() == n;
    return c;
  }

  double mean_cz_count() const {
    double s = 0.0;
    for (const auto& d : decomps_) s += d.cz_count();
    return s / static_cast<double>(decomps_.size());
  }

 private:
  CliffordGroup2() {
    const auto& c1 = CliffordGroup1::instance();
    std::vector<Tableau2> layer_t;
    std::vector<CliffordLayer> layers;
    for (std::size_t a = 0; a < c1.size(); ++a)
      for (std::size_t b = 0; b < c1.size(); ++b) {
        layers.push_back({a, b});
        layer_t.push_back(Tableau2::from_unitary(tensor(c1[a].matrix, c1[b].matrix)));
      }
    const Tableau2 cz = Tableau2::from_unitary(cz_matrix());
    std::vector<std::size_t> frontier;
    for (std::size_t l = 0; l < layers.size(); ++l) add({{layers[l]}}, layer_t[l], frontier);
    while (!frontier.empty()) {
      std::vector<std::size_t> next;
      for (std::size_t e : frontier) {
        const Tableau2 base = cz.after(tableaux_[e]);
        for (std::size_t l = 0; l < layers.size(); ++l) {
          const Tableau2 t = layer_t[l].after(base);
          if (index_.count(t.key())) continue;
          Clifford2Decomposition d = decomps_[e];
          d.layers.push_back(layers[l]);
          add(std::move(d), t, next);
        }
      }
      frontier = std::move(next);
    }
  }

  void add(Clifford2Decomposition d, const Tableau2& t, std::vector<std::size_t>& frontier) {
    if (!index_.emplace(t.key(), decomps_.size()).second) return;
    frontier.push_back(decomps_.size());
    decomps_.push_back(std::move(d));
    tableaux_.push_back(t);
  }

  std::vector<Clifford2Decomposition> decomps_;
  std::vector<Tableau2> tableaux_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
};

}  // namespace geoqc
