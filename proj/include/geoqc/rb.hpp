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

#include "geoqc/clifford.hpp"
#include "geoqc/parallel.hpp"
#include "geoqc/tomo.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <memory>
#include <numeric>
#include <optional>
#include <random>

/// Randomized benchmarking: sequences, gate-set simulators, decay fits,
/// fidelity conversions and bootstrap errors.
namespace geoqc {

inline constexpr double kGatesPerClifford1 = 1.875;

// ---------------------------------------------------------------------------
// Group access shared by the one- and two-qubit protocols

inline std::size_t clifford_group_size(int n_qubits) {
  return n_qubits == 1 ? CliffordGroup1::instance().size() : CliffordGroup2::instance().size();
}

inline ComplexMatrix clifford_matrix(int n_qubits, std::size_t i) {
  return n_qubits == 1 ? CliffordGroup1::instance()[i].matrix : CliffordGroup2::instance().matrix(i);
}

inline std::size_t clifford_find(int n_qubits, const ComplexMatrix& u) {
  return n_qubits == 1 ? CliffordGroup1::instance().find(u) : CliffordGroup2::instance().find(u);
}

/// Cliffords in time order; the last entry is the recovery gate.
struct RBSequence {
  int n_qubits = 1;
  std::vector<std::size_t> cliffords;

  std::size_t recovery() const { return cliffords.back(); }

  ComplexMatrix ideal_unitary() const {
    ComplexMatrix u = identity(qubit_dim(n_qubits));
    for (std::size_t c : cliffords) u = clifford_matrix(n_qubits, c) * u;
    return u;
  }
};

/// m uniformly drawn Cliffords, each followed by `interleave` if given, and
/// the recovery Clifford that returns the ideal product to the identity.
inline RBSequence rb_sequence(int n_qubits, std::size_t m, std::optional<std::size_t> interleave,
                              std::mt19937_64& rng) {
  if (m < 1) throw std::invalid_argument("rb_sequence: m must be at least 1");
  const std::size_t size = clifford_group_size(n_qubits);
  std::uniform_int_distribution<std::size_t> pick(0, size - 1);
  RBSequence s{n_qubits, {}};
  ComplexMatrix u = identity(qubit_dim(n_qubits));
  auto push = [&](std::size_t c) {
    s.cliffords.push_back(c);
    u = clifford_matrix(n_qubits, c) * u;
  };
  for (std::size_t k = 0; k < m; ++k) {
    push(pick(rng));
    if (interleave) push(*interleave);
  }
  s.cliffords.push_back(clifford_find(n_qubits, u.adjoint()));
  return s;
}

inline RBSequence rb_sequence(int n_qubits, std::size_t m, std::optional<std::size_t> interleave,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return rb_sequence(n_qubits, m, interleave, rng);
}

// ---------------------------------------------------------------------------
// Gate sets: how a Clifford acts on a density matrix

class GateSet {
 public:
  virtual ~GateSet() = default;
  virtual int n_qubits() const = 0;
  /// rho after Clifford `c` of the group.
  virtual ComplexMatrix apply(std::size_t c, const ComplexMatrix& rho) const = 0;
};

class IdealGateSet : public GateSet {
 public:
  explicit IdealGateSet(int n) : n_(n) {}
  int n_qubits() const override { return n_; }
  ComplexMatrix apply(std::size_t c, const ComplexMatrix& rho) const override {
    const ComplexMatrix u = clifford_matrix(n_, c);
    return u * rho * u.adjoint();
  }

 private:
  int n_;
};

/// Ideal Clifford followed by rho -> p rho + (1 - p) I / d.
class DepolarizingGateSet : public GateSet {
 public:
  DepolarizingGateSet(int n, double p) : n_(n), dep_(QuantumChannel::depolarizing(qubit_dim(n), p)) {}
  int n_qubits() const override { return n_; }
  ComplexMatrix apply(std::size_t c, const ComplexMatrix& rho) const override {
    const ComplexMatrix u = clifford_matrix(n_, c);
    return dep_.apply(u * rho * u.adjoint());
  }

 private:
  int n_;
  QuantumChannel dep_;
};

/// Physical single-qubit gates of the Clifford table.
inline const std::vector<std::string>& physical_gate_names() {
  static const std::vector<std::string> names{"I", "X", "Y", "X/2", "Y/2", "-X/2", "-Y/2"};
  return names;
}

struct GateSetOptions {
  GateKind kind = GateKind::geometric;
  GateConfig config = GateConfig::A;
  ErrorInjection error;
  bool decoherence = true;
  double dt = kDefaultDt;
};

/// Single-qubit Cliffords compiled to simulated pulse channels on one qubit.
class PulseGateSet1 : public GateSet {
 public:
  PulseGateSet1(const DeviceModel& device, Channel qubit, const GateSetOptions& o = {}) {
    PulseOptions po = PulseOptions::for_qubit(qubit == Channel::xy_a ? device.qubit_a : device.qubit_b, qubit);
    const auto& names = physical_gate_names();
    std::vector<QuantumChannel> raw(names.size());
    parallel_for(names.size(), [&](std::size_t i) {
      raw[i] = gate_channel(named_gate(names[i], o.kind, o.config, o.dt, po), device, o.error, o.decoherence);
    });
    for (std::size_t i = 0; i < names.size(); ++i) gates_[names[i]] = raw[i];
    for (const auto& e : CliffordGroup1::instance().elements()) {
      QuantumChannel ch = QuantumChannel::identity(2);
      for (const auto& g : e.decomposition) ch = ch.then(gates_.at(g));
      cliffords_.push_back(std::move(ch));
    }
  }

  int n_qubits() const override { return 1; }
  ComplexMatrix apply(std::size_t c, const ComplexMatrix& rho) const override { return cliffords_[c].apply(rho); }
  const QuantumChannel& gate(const std::string& name) const { return gates_.at(name); }
  const QuantumChannel& clifford(std::size_t c) const { return cliffords_[c]; }

 private:
  std::map<std::string, QuantumChannel> gates_;
  std::vector<QuantumChannel> cliffords_;
};

/// Two-qubit gate set on the pair. Single-qubit layers are played as
/// parallel 80 ns slots (the shorter side idles) on the pair model with the
/// static ZZ shift; CZ is a supplied channel.
class PulseGateSet2 : public GateSet {
 public:
  PulseGateSet2(const DeviceModel& device, QuantumChannel cz, const GateSetOptions& o = {},
                const EvolveOptions& pair = {Model::pair_effective})
      : cz_(std::move(cz)) {
    if (cz_.dim() != 4) throw std::invalid_argument("PulseGateSet2: CZ channel must act on two qubits");
    const auto& names = physical_gate_names();
    const std::size_t n = names.size();
    const PulseOptions pa = PulseOptions::for_qubit(device.qubit_a, Channel::xy_a);
    const PulseOptions pb = PulseOptions::for_qubit(device.qubit_b, Channel::xy_b);
    slots_.resize(n * n);
    parallel_for(n * n, [&](std::size_t k) {
      const PulseSchedule s = named_gate(names[k / n], o.kind, o.config, o.dt, pa)
                                  .alongside(named_gate(names[k % n], o.kind, o.config, o.dt, pb));
      slots_[k] = gate_channel(s, device, o.error, o.decoherence, pair);
    });
    for (std::size_t i = 0; i < n; ++i) index_[names[i]] = i;
  }

  int n_qubits() const override { return 2; }

  const QuantumChannel& slot(const std::string& a, const std::string& b) const {
    return slots_[index_.at(a) * index_.size() + index_.at(b)];
  }

  /// Plays C1 elements `ca` on Q_A and `cb` on Q_B slot by slot. A masked
  /// qubit idles through its element's slots instead of driving them.
  ComplexMatrix apply_layer(std::size_t ca, std::size_t cb, ComplexMatrix rho, bool drive_a = true,
                            bool drive_b = true) const {
    const auto& c1 = CliffordGroup1::instance();
    const auto& da = c1[ca].decomposition;
    const auto& db = c1[cb].decomposition;
    const std::size_t len = std::max(da.size(), db.size());
    for (std::size_t k = 0; k < len; ++k)
      rho = slot(drive_a && k < da.size() ? da[k] : "I", drive_b && k < db.size() ? db[k] : "I").apply(rho);
    return rho;
  }

  ComplexMatrix apply(std::size_t c, const ComplexMatrix& rho) const override {
    const auto& d = CliffordGroup2::instance().decomposition(c);
    ComplexMatrix r = rho;
    for (std::size_t l = 0; l < d.layers.size(); ++l) {
      if (l) r = cz_.apply(r);
      r = apply_layer(d.layers[l].a, d.layers[l].b, r);
    }
    return r;
  }

  const QuantumChannel& cz() const { return cz_; }

 private:
  QuantumChannel cz_;
  std::vector<QuantumChannel> slots_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Data and fits

struct DecayFit {
  double a = 0.0, p = 1.0, b = 0.0;
  double sigma_a = 0.0, sigma_p = 0.0, sigma_b = 0.0;
  bool degenerate = false;  // flat data: p is not identifiable
};

struct RBDataset {
  int n_qubits = 1;
  std::vector<std::size_t> m_values;
  std::vector<std::vector<double>> fidelities;  // [m index][sequence]
  DecayFit fit;

  std::size_t k() const { return fidelities.empty() ? 0 : fidelities.front().size(); }

  std::vector<double> means() const {
    std::vector<double> out;
    for (const auto& f : fidelities) out.push_back(std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size()));
    return out;
  }

  std::vector<double> stddevs() const {
    std::vector<double> out;
    const auto mu = means();
    for (std::size_t i = 0; i < fidelities.size(); ++i) {
      double s = 0.0;
      for (double f : fidelities[i]) s += (f - mu[i]) * (f - mu[i]);
      out.push_back(fidelities[i].size() > 1 ? std::sqrt(s / static_cast<double>(fidelities[i].size() - 1)) : 0.0);
    }
    return out;
  }
};

namespace detail {

struct DecayFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>& m;
  const std::vector<double>& f;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(m.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    for (std::size_t i = 0; i < m.size(); ++i)
      r(static_cast<Index>(i)) = x(0) * std::pow(x(1), m[i]) + x(2) - f[i];
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Index r = static_cast<Index>(i);
      j(r, 0) = std::pow(x(1), m[i]);
      j(r, 1) = m[i] == 0.0 ? 0.0 : x(0) * m[i] * std::pow(x(1), m[i] - 1.0);
      j(r, 2) = 1.0;
    }
    return 0;
  }
};

}  // namespace detail

/// Least-squares fit of F = A p^m + B to (m, F) points. B starts at 1/d,
/// A at F(m_min) - B, p from a log-linear fit of F - B.
inline DecayFit fit_decay(const std::vector<double>& m, const std::vector<double>& f, int n_qubits) {
  if (m.size() != f.size()) throw std::invalid_argument("fit_decay: size mismatch");
  std::vector<double> distinct = m;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw std::invalid_argument("fit_decay: need at least 3 distinct sequence lengths");

  DecayFit out;
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  if (*hi - *lo < 1e-12) {
    out.degenerate = true;
    out.a = 0.0;
    out.p = 1.0;
    out.b = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    return out;
  }

  const double b0 = 1.0 / static_cast<double>(qubit_dim(n_qubits));
  const std::size_t imin = static_cast<std::size_t>(std::min_element(m.begin(), m.end()) - m.begin());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double y = f[i] - b0;
    if (y <= 1e-9) continue;
    sx += m[i], sy += std::log(y), sxx += m[i] * m[i], sxy += m[i] * std::log(y), n += 1;
  }
  double p0 = 0.99;
  if (n >= 2 && n * sxx - sx * sx > 0.0) p0 = std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
  p0 = std::clamp(p0, 0.05, 0.999999);
  const double a0 = (f[imin] - b0) / std::pow(p0, m[imin]);

  Eigen::VectorXd x(3);
  x << a0, p0, b0;
  detail::DecayFunctor fn{m, f};
  Eigen::LevenbergMarquardt<detail::DecayFunctor> lm(fn);
  lm.parameters.maxfev = 2000;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
      status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !x.allFinite())
    throw std::runtime_error("fit_decay: did not converge");
  out.a = x(0);
  out.p = x(1);
  out.b = x(2);

  const Index nv = static_cast<Index>(m.size());
  Eigen::VectorXd r(nv);
  Eigen::MatrixXd j(nv, 3);
  fn(x, r);
  fn.df(x, j);
  if (nv > 3) {
    const double s2 = r.squaredNorm() / static_cast<double>(nv - 3);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
      const Eigen::MatrixXd cov = s2 * lu.inverse();
      out.sigma_a = std::sqrt(std::max(0.0, cov(0, 0)));
      out.sigma_p = std::sqrt(std::max(0.0, cov(1, 1)));
      out.sigma_b = std::sqrt(std::max(0.0, cov(2, 2)));
    }
  }
  return out;
}

/// Fits the per-length mean fidelities.
inline DecayFit fit_decay(const RBDataset& data) {
  std::vector<double> m;
  for (auto v : data.m_values) m.push_back(static_cast<double>(v));
  return fit_decay(m, data.means(), data.n_qubits);
}

// ---------------------------------------------------------------------------
// Fidelity conversions

/// Average fidelity per physical gate from the reference decay:
/// 1 - (1 - p)(d - 1)/d / gates_per_clifford.
inline double reference_fidelity(double p_ref, Index d, double gates_per_clifford = 1.0) {
  if (!(p_ref > 0.0 && p_ref <= 1.0 + 1e-12)) throw std::invalid_argument("reference_fidelity: p must be in (0, 1]");
  const double dd = static_cast<double>(d);
  return 1.0 - (1.0 - p_ref) * (dd - 1.0) / dd / gates_per_clifford;
}

struct InterleavedFidelity {
  double fidelity = 1.0;
  bool exceeds_reference = false;  // p_gate > p_ref beyond `noise`
};

/// 1 - (1 - p_gate/p_ref)(d - 1)/d.
inline InterleavedFidelity interleaved_fidelity(double p_gate, double p_ref, Index d, double noise = 0.0) {
  if (!(p_gate > 0.0 && p_ref > 0.0)) throw std::invalid_argument("interleaved_fidelity: p must be positive");
  const double dd = static_cast<double>(d);
  InterleavedFidelity out;
  out.fidelity = 1.0 - (1.0 - p_gate / p_ref) * (dd - 1.0) / dd;
  out.exceeds_reference = p_gate > p_ref + noise;
  return out;
}

/// Error per Clifford r = (1 - p)(d - 1)/d.
inline double error_per_clifford(double p, Index d) {
  const double dd = static_cast<double>(d);
  return (1.0 - p) * (dd - 1.0) / dd;
}

// ---------------------------------------------------------------------------
// Running sequences

struct RBOptions {
  std::vector<std::size_t> m_values{1, 5, 10, 20, 40, 60, 80, 100};
  std::size_t k = 20;
  std::optional<std::size_t> interleave;  // Clifford index inserted after each random Clifford
  std::uint64_t seed = 1;
  std::optional<MeasurementModel> measurement;  // readout/shot layer for the survival probability
};

/// Deterministic per-sequence seed, independent of scheduling.
inline std::uint64_t sequence_seed(std::uint64_t seed, std::size_t mi, std::size_t si) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(mi), static_cast<std::uint32_t>(si)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline ComplexMatrix ground_state(int n_qubits) {
  const Index d = qubit_dim(n_qubits);
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

/// Survival probability of |0...0> through the optional measurement layer.
inline double survival(const ComplexMatrix& rho, const std::optional<MeasurementModel>& meas, std::mt19937_64& rng) {
  if (!meas) return std::clamp(rho(0, 0).real(), 0.0, 1.0);
  const RealVector p = rho.diagonal().real().cwiseMax(0.0);
  return meas->measure(p / p.sum(), rng)(0);
}

inline ComplexMatrix run_sequence(const GateSet& gates, const RBSequence& s) {
  ComplexMatrix rho = ground_state(gates.n_qubits());
  for (std::size_t c : s.cliffords) rho = gates.apply(c, rho);
  return rho;
}

inline RBDataset run_rb(const GateSet& gates, const RBOptions& o) {
  if (o.k < 1) throw std::invalid_argument("run_rb: k must be at least 1");
  const int n = gates.n_qubits();
  RBDataset data{n, o.m_values, std::vector<std::vector<double>>(o.m_values.size(), std::vector<double>(o.k))};
  parallel_for(o.m_values.size() * o.k, [&](std::size_t job) {
    const std::size_t mi = job / o.k, si = job % o.k;
    std::mt19937_64 rng(sequence_seed(o.seed, mi, si));
    const RBSequence s = rb_sequence(n, o.m_values[mi], o.interleave, rng);
    data.fidelities[mi][si] = survival(run_sequence(gates, s), o.measurement, rng);
  });
  data.fit = fit_decay(data);
  return data;
}

// ---------------------------------------------------------------------------
// Bootstrap

struct BootstrapResult {
  double sigma_p = 0.0, sigma_a = 0.0, sigma_b = 0.0;
  std::size_t failed = 0;  // resamples whose refit did not converge
};

/// Resamples sequences with replacement within each length and refits.
inline BootstrapResult bootstrap_uncertainty(const RBDataset& data, std::size_t resamples, std::uint64_t seed) {
  if (resamples < 100) throw std::invalid_argument("bootstrap_uncertainty: need at least 100 resamples");
  std::vector<double> m;
  for (auto v : data.m_values) m.push_back(static_cast<double>(v));
  std::vector<std::optional<DecayFit>> fits(resamples);
  parallel_for(resamples, [&](std::size_t r) {
    std::mt19937_64 rng(sequence_seed(seed, r, 0));
    std::vector<double> means;
    for (const auto& row : data.fidelities) {
      std::uniform_int_distribution<std::size_t> pick(0, row.size() - 1);
      double s = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) s += row[pick(rng)];
      means.push_back(s / static_cast<double>(row.size()));
    }
    try {
      fits[r] = fit_decay(m, means, data.n_qubits);
    } catch (const std::runtime_error&) {
    }
  });
  BootstrapResult out;
  std::vector<double> ps, as, bs;
  for (const auto& f : fits) {
    if (!f) {
      ++out.failed;
      continue;
    }
    ps.push_back(f->p), as.push_back(f->a), bs.push_back(f->b);
  }
  auto sd = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };
  out.sigma_p = sd(ps);
  out.sigma_a = sd(as);
  out.sigma_b = sd(bs);
  return out;
}

// ---------------------------------------------------------------------------
// Simultaneous RB

/// Two-qubit gate set for simultaneous single-qubit RB: a Clifford index is
/// a pair (ca, cb) encoded as ca * 24 + cb and played slot by slot.
class LayerGateSet : public GateSet {
 public:
  explicit LayerGateSet(const PulseGateSet2& pair, bool drive_a = true, bool drive_b = true)
      : pair_(pair), drive_a_(drive_a), drive_b_(drive_b) {}
  int n_qubits() const override { return 2; }
  ComplexMatrix apply(std::size_t c, const ComplexMatrix& rho) const override {
    return pair_.apply_layer(c / 24, c % 24, rho, drive_a_, drive_b_);
  }

 private:
  const PulseGateSet2& pair_;
  bool drive_a_, drive_b_;
};

struct SimultaneousRBResult {
  RBDataset a_alone, b_alone, a_simultaneous, b_simultaneous;

  double r_a() const { return error_per_clifford(a_alone.fit.p, 2); }
  double r_b() const { return error_per_clifford(b_alone.fit.p, 2); }
  double r_a_given_b() const { return error_per_clifford(a_simultaneous.fit.p, 2); }
  double r_b_given_a() const { return error_per_clifford(b_simultaneous.fit.p, 2); }
};

/// Q_A alone, Q_B alone and both driven. Sequences are Clifford-synchronous:
/// each step plays the layer of both drawn elements, and in the single-qubit
/// runs the other qubit idles through its slots, so all three runs share the
/// same timing. Survival is read from each qubit's marginal.
inline SimultaneousRBResult simultaneous_rb(const PulseGateSet2& pair, const RBOptions& o) {
  const LayerGateSet both_driven(pair), a_only(pair, true, false), b_only(pair, false, true);
  const std::size_t nm = o.m_values.size();
  auto blank = [&] {
    return RBDataset{1, o.m_values, std::vector<std::vector<double>>(nm, std::vector<double>(o.k))};
  };
  SimultaneousRBResult out{blank(), blank(), blank(), blank()};
  const std::array<Index, 2> dims{2, 2};
  parallel_for(nm * o.k, [&](std::size_t job) {
    const std::size_t mi = job / o.k, si = job % o.k;
    std::mt19937_64 rng(sequence_seed(o.seed, mi, si));
    const RBSequence sa = rb_sequence(1, o.m_values[mi], std::nullopt, rng);
    const RBSequence sb = rb_sequence(1, o.m_values[mi], std::nullopt, rng);
    RBSequence s{2, {}};
    for (std::size_t k = 0; k < sa.cliffords.size(); ++k) s.cliffords.push_back(sa.cliffords[k] * 24 + sb.cliffords[k]);
    auto marginal = [&](const ComplexMatrix& rho, Index q) {
      return std::clamp(partial_trace(rho, std::span<const Index>(dims), q)(0, 0).real(), 0.0, 1.0);
    };
    out.a_alone.fidelities[mi][si] = marginal(run_sequence(a_only, s), 0);
    out.b_alone.fidelities[mi][si] = marginal(run_sequence(b_only, s), 1);
    const ComplexMatrix both = run_sequence(both_driven, s);
    out.a_simultaneous.fidelities[mi][si] = marginal(both, 0);
    out.b_simultaneous.fidelities[mi][si] = marginal(both, 1);
  });
  for (RBDataset* d : {&out.a_alone, &out.b_alone, &out.a_simultaneous, &out.b_simultaneous}) d->fit = fit_decay(*d);
  return out;
}

}  // namespace geoqc
