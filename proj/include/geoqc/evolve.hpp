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
#include "geoqc/pulses.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

/// Time evolution of pulse schedules.
///
/// Four physical models are available. `single_a` / `single_b` evolve one
/// transmon (2 or 3 levels, as the device says). `pair_effective` is the
/// two-qubit computational space with both drives and the static ZZ shift.
/// `pair_coupled` is the full 3x3-level pair with the exchange coupling and
/// the flux-modulation channel; its computational output is read in the
/// dressed (eigen)basis of the static pair, in the frame that removes the
/// dressed single-qubit energies but keeps the ZZ shift.
namespace geoqc {

struct ErrorInjection {
  double rabi_scale = 0.0;    // Omega -> Omega (1 + eps)
  double detuning_mhz = 0.0;  // static detuning of the driven qubit(s)

  bool none() const { return rabi_scale == 0.0 && detuning_mhz == 0.0; }
  void validate() const {
    if (!std::isfinite(rabi_scale) || !std::isfinite(detuning_mhz))
      throw std::invalid_argument("ErrorInjection: non-finite value");
  }
};

enum class Model { automatic, single_a, single_b, pair_effective, pair_coupled };

struct EvolveOptions {
  Model model = Model::automatic;
  bool zz_coupling = true;                 // pair_effective only
  std::optional<double> zz_override_mhz;   // replaces the analytic ZZ rate
};

/// Scales every XY sample by (1 + eps) and records the detuning.
inline PulseSchedule apply_error(const PulseSchedule& schedule, const ErrorInjection& err) {
  err.validate();
  if (err.none()) return schedule;
  PulseSchedule out = schedule;
  const double f = 1.0 + err.rabi_scale;
  for (auto& [c, segs] : out.channels) {
    if (c == Channel::z_a) continue;
    for (auto& s : segs) {
      for (double& v : s.envelope.samples) v *= f;
      for (double& v : s.quadrature.samples) v *= f;
      s.area = s.envelope.area();
    }
  }
  out.detuning_mhz += err.detuning_mhz;
  return out;
}

inline Model resolve_model(const PulseSchedule& s, Model requested) {
  if (requested != Model::automatic) return requested;
  if (s.drives(Channel::z_a)) return Model::pair_coupled;
  if (s.has_channel(Channel::xy_a) && s.has_channel(Channel::xy_b)) return Model::pair_effective;
  if (s.has_channel(Channel::xy_b)) return Model::single_b;
  return Model::single_a;
}

/// Dressed eigenbasis of the static pair Hamiltonian in the frame rotating
/// at Q_B's frequency for both transmons.
struct DressedFrame {
  PairOperators ops{3, 3};
  double delta_ab = 0.0;           // rad/ns
  ComplexMatrix basis;             // column k is the dressed partner of bare state k
  RealVector energies;             // rad/ns, matched to bare labels
  std::array<Index, 4> comp{};     // |00>, |01>, |10>, |11>

  explicit DressedFrame(const DeviceModel& d) {
    delta_ab = angular(1e3 * (d.qubit_a.freq_ghz - d.qubit_b.freq_ghz));
    const ComplexMatrix exchange = angular(d.g_ab_mhz) * ops.a.adjoint() * ops.b;
    const ComplexMatrix h = delta_ab * ops.na + pair_anharmonic_terms(d, ops) + exchange + exchange.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    const Index n = ops.dim();
    basis.resize(n, n);
    energies.resize(n);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Index k = 0; k < n; ++k) {
      Index best = -1;
      double weight = -1.0;
      for (Index j = 0; j < n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double w = std::norm(es.eigenvectors()(k, j));
        if (w > weight) weight = w, best = j;
      }
      used[static_cast<std::size_t>(best)] = true;
      ComplexVector v = es.eigenvectors().col(best);
      v *= std::polar(1.0, -std::arg(v(k)));
      basis.col(k) = v;
      energies(k) = es.eigenvalues()(best);
    }
    comp = {ops.index(0, 0), ops.index(0, 1), ops.index(1, 0), ops.index(1, 1)};
  }

  /// Dressed ZZ shift E11 - E01 - E10 + E00, in MHz.
  double zz_mhz() const {
    return (energies(comp[3]) - energies(comp[1]) - energies(comp[2]) + energies(comp[0])) / angular(1.0);
  }

  /// Embedding of computational states: columns are the dressed |00>..|11>.
  ComplexMatrix input_map() const {
    ComplexMatrix s(ops.dim(), 4);
    for (int k = 0; k < 4; ++k) s.col(k) = basis.col(comp[static_cast<std::size_t>(k)]);
    return s;
  }

  /// Readout of the computational block after time t: dressed projection with
  /// the non-interacting dressed phases removed (|11> is referenced to
  /// E01 + E10 - E00 so the ZZ phase stays visible).
  ComplexMatrix output_map(double t) const {
    ComplexVector frame(ops.dim());
    for (Index k = 0; k < ops.dim(); ++k) frame(k) = std::exp(-kI * delta_ab * ops.na(k, k).real() * t);
    const std::array<double, 4> ref{energies(comp[0]), energies(comp[1]), energies(comp[2]),
                                    energies(comp[1]) + energies(comp[2]) - energies(comp[0])};
    ComplexMatrix out = input_map().adjoint() * frame.asDiagonal();
    for (int k = 0; k < 4; ++k) out.row(k) *= std::exp(kI * ref[static_cast<std::size_t>(k)] * t);
    return out;
  }
};

/// Per-step Hamiltonians and collapse operators of a schedule under one model.
class ScheduleDynamics {
 public:
  ScheduleDynamics(const PulseSchedule& schedule, const DeviceModel& device, const EvolveOptions& opts = {},
                   bool decoherence = false)
      : model_(resolve_model(schedule, opts.model)), device_(device), dt_(schedule.dt) {
    schedule.validate();
    steps_ = schedule.num_samples();
    xy_a_ = schedule.flatten(Channel::xy_a);
    xy_b_ = schedule.flatten(Channel::xy_b);
    for (const auto& v : schedule.flatten(Channel::z_a)) z_a_.push_back(v.real());
    const double det = schedule.detuning_mhz;
    det_a_ = schedule.drives(Channel::xy_a) ? det : 0.0;
    det_b_ = schedule.drives(Channel::xy_b) ? det : 0.0;
    virtual_z_ = schedule.virtual_z;

    TransmonParams qa = device.qubit_a, qb = device.qubit_b;
    switch (model_) {
      case Model::single_a:
      case Model::single_b: {
        if (model_ == Model::single_a && schedule.drives(Channel::xy_b))
          throw std::invalid_argument("evolve: single_a model cannot play a schedule that drives xy_b");
        if (model_ == Model::single_b && schedule.drives(Channel::xy_a))
          throw std::invalid_argument("evolve: single_b model cannot play a schedule that drives xy_a");
        if (schedule.drives(Channel::z_a))
          throw std::invalid_argument("evolve: flux modulation requires the pair_coupled model");
        const TransmonParams& q = model_ == Model::single_a ? qa : qb;
        dim_ = q.levels;
        comp_dim_ = 2;
        if (decoherence) collapse_ = collapse_operators(q);
        break;
      }
      case Model::pair_effective: {
        if (schedule.drives(Channel::z_a))
          throw std::invalid_argument("evolve: flux modulation requires the pair_coupled model");
        qa.levels = qb.levels = 2;
        dim_ = comp_dim_ = 4;
        if (opts.zz_coupling) zz_ = angular(opts.zz_override_mhz.value_or(zz_rate(device)));
        if (decoherence) add_pair_collapse(qa, qb);
        break;
      }
      case Model::pair_coupled: {
        qa.levels = qb.levels = 3;
        dim_ = 9;
        comp_dim_ = 4;
        ops_.emplace(3, 3);
        frame_.emplace(device);
        if (decoherence) add_pair_collapse(qa, qb);
        break;
      }
      case Model::automatic: break;
    }
    qa_ = qa;
    qb_ = qb;
  }

  Model model() const { return model_; }
  Index dim() const { return dim_; }
  Index comp_dim() const { return comp_dim_; }
  std::size_t steps() const { return steps_; }
  double dt() const { return dt_; }
  double duration() const { return dt_ * static_cast<double>(steps_); }
  const std::vector<ComplexMatrix>& collapse() const { return collapse_; }
  const std::optional<DressedFrame>& frame() const { return frame_; }

  /// Hamiltonian at the midpoint of step k, rad/ns.
  ComplexMatrix hamiltonian(std::size_t k) const {
    const double t = (static_cast<double>(k) + 0.5) * dt_;
    switch (model_) {
      case Model::single_a: return drive_hamiltonian(qa_, xy_a_[k], det_a_);
      case Model::single_b: return drive_hamiltonian(qb_, xy_b_[k], det_b_);
      case Model::pair_effective: {
        ComplexMatrix h = tensor(drive_hamiltonian(qa_, xy_a_[k], det_a_), identity(2)) +
                          tensor(identity(2), drive_hamiltonian(qb_, xy_b_[k], det_b_));
        h(3, 3) += zz_;
        return h;
      }
      case Model::pair_coupled: {
        const double z = z_a_.empty() ? 0.0 : z_a_[k];
        ComplexMatrix h = coupled_hamiltonian(device_, *ops_, z, t);
        if (xy_a_[k] != Complex(0.0) || det_a_ != 0.0)
          h += tensor(drive_hamiltonian(qa_, xy_a_[k], det_a_), identity(3));
        if (xy_b_[k] != Complex(0.0) || det_b_ != 0.0)
          h += tensor(identity(3), drive_hamiltonian(qb_, xy_b_[k], det_b_));
        return h;
      }
      case Model::automatic: break;
    }
    throw std::logic_error("ScheduleDynamics: unresolved model");
  }

  /// Full-space operators whose span is the computational input space:
  /// input_map() * |i><j| * input_map()^dag.
  ComplexMatrix input_map() const {
    if (frame_) return frame_->input_map();
    ComplexMatrix e = ComplexMatrix::Zero(dim_, comp_dim_);
    e.topLeftCorner(comp_dim_, comp_dim_) = identity(comp_dim_);
    return e;
  }

  /// Maps a full-space output onto the computational block (with the
  /// pending virtual Z rotations applied).
  ComplexMatrix output_map() const {
    ComplexMatrix p;
    if (frame_) {
      p = frame_->output_map(duration());
    } else {
      p = ComplexMatrix::Zero(comp_dim_, dim_);
      p.topLeftCorner(comp_dim_, comp_dim_) = identity(comp_dim_);
    }
    return virtual_z_operator() * p;
  }

  /// exp(i theta n) on each qubit of the computational block.
  ComplexMatrix virtual_z_operator() const {
    auto vz = [](double th) {
      ComplexMatrix v = identity(2);
      v(1, 1) = std::polar(1.0, th);
      return v;
    };
    switch (model_) {
      case Model::single_a: return vz(virtual_z_[0]);
      case Model::single_b: return vz(virtual_z_[1]);
      default: return tensor(vz(virtual_z_[0]), vz(virtual_z_[1]));
    }
  }

 private:
  void add_pair_collapse(const TransmonParams& qa, const TransmonParams& qb) {
    for (const auto& l : collapse_operators(qa)) collapse_.push_back(tensor(l, identity(qb.levels)));
    for (const auto& l : collapse_operators(qb)) collapse_.push_back(tensor(identity(qa.levels), l));
  }

  Model model_;
  DeviceModel device_;
  double dt_;
  std::size_t steps_ = 0;
  std::vector<Complex> xy_a_, xy_b_;
  std::vector<double> z_a_;
  double det_a_ = 0.0, det_b_ = 0.0, zz_ = 0.0;
  std::array<double, 2> virtual_z_{0, 0};
  Index dim_ = 2, comp_dim_ = 2;
  TransmonParams qa_, qb_;
  std::vector<ComplexMatrix> collapse_;
  std::optional<PairOperators> ops_;
  std::optional<DressedFrame> frame_;
};

/// Time-ordered product of midpoint exponentials over the full model space.
/// Virtual Z rotations are not included (see gate_unitary).
inline ComplexMatrix propagate_unitary(const ScheduleDynamics& dyn) {
  ComplexMatrix u = identity(dyn.dim());
  for (std::size_t k = 0; k < dyn.steps(); ++k) u = expm_hermitian(dyn.hamiltonian(k), dyn.dt()) * u;
  return u;
}

inline ComplexMatrix propagate_unitary(const PulseSchedule& schedule, const DeviceModel& device,
                                       const ErrorInjection& err = {}, const EvolveOptions& opts = {}) {
  return propagate_unitary(ScheduleDynamics(apply_error(schedule, err), device, opts, false));
}

/// Computational-block operator of a schedule: projected, framed, with
/// virtual Z applied. Unitary up to leakage.
inline ComplexMatrix gate_unitary(const PulseSchedule& schedule, const DeviceModel& device,
                                  const ErrorInjection& err = {}, const EvolveOptions& opts = {}) {
  const ScheduleDynamics dyn(apply_error(schedule, err), device, opts, false);
  return dyn.output_map() * propagate_unitary(dyn) * dyn.input_map();
}

/// RK4 integration of the Lindblad equation for a batch of operators, with
/// the Hamiltonian held at its midpoint value within each step. The batch is
/// evolved as columns of row-major vectorisations under the Liouvillian.
inline std::vector<ComplexMatrix> propagate_lindblad(std::vector<ComplexMatrix> rhos, const ScheduleDynamics& dyn) {
  const double dt = dyn.dt();
  const Index d = dyn.dim();
  const Index n = static_cast<Index>(rhos.size());
  const ComplexMatrix id = identity(d);
  ComplexMatrix dissipator = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& l : dyn.collapse()) {
    const ComplexMatrix ll = l.adjoint() * l;
    dissipator += tensor(l, l.conjugate()) - 0.5 * (tensor(ll, id) + tensor(id, ll.transpose()));
  }
  std::vector<Complex> trace0;
  ComplexMatrix v(d * d, n);
  for (Index c = 0; c < n; ++c) {
    const ComplexMatrix& r = rhos[static_cast<std::size_t>(c)];
    if (r.rows() != d || r.cols() != d)
      throw std::invalid_argument("propagate_lindblad: operator dimension does not match the model");
    trace0.push_back(r.trace());
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) v(i * d + j, c) = r(i, j);
  }
  ComplexMatrix liou(d * d, d * d), k1, k2, k3, k4;
  for (std::size_t k = 0; k < dyn.steps(); ++k) {
    const ComplexMatrix h = dyn.hamiltonian(k);
    liou = dissipator - kI * (tensor(h, id) - tensor(id, h.transpose()));
    k1.noalias() = liou * v;
    k2.noalias() = liou * (v + 0.5 * dt * k1);
    k3.noalias() = liou * (v + 0.5 * dt * k2);
    k4.noalias() = liou * (v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  for (Index c = 0; c < n; ++c) {
    ComplexMatrix& r = rhos[static_cast<std::size_t>(c)];
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) r(i, j) = v(i * d + j, c);
  }
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    const double drift = std::abs(rhos[i].trace() - trace0[i]);
    if (drift > 1e-6) {
      std::ostringstream msg;
      msg << "propagate_lindblad: trace drift " << drift << " after " << dyn.steps() << " steps of dt = " << dt
          << " ns; reduce the step size";
      throw std::runtime_error(msg.str());
    }
  }
  return rhos;
}

inline DensityMatrix propagate_lindblad(const DensityMatrix& rho0, const PulseSchedule& schedule,
                                        const DeviceModel& device, const ErrorInjection& err = {},
                                        const EvolveOptions& opts = {}, bool decoherence = true) {
  const ScheduleDynamics dyn(apply_error(schedule, err), device, opts, decoherence);
  ComplexMatrix out = propagate_lindblad(std::vector<ComplexMatrix>{rho0.matrix()}, dyn).front();
  const double herm = hermiticity_error(out);
  if (herm > 1e-9)
    throw std::runtime_error("propagate_lindblad: Hermiticity lost (error " + std::to_string(herm) + ")");
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

/// Linear map on dim x dim operators, stored as a superoperator acting on
/// row-major vectorisations: vec(A rho B) = (A kron B^T) vec(rho).
class QuantumChannel {
 public:
  QuantumChannel() = default;
  explicit QuantumChannel(ComplexMatrix superop, double leakage = 0.0)
      : s_(std::move(superop)), leakage_(leakage) {
    const Index n = s_.rows();
    dim_ = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (s_.rows() != s_.cols() || dim_ * dim_ != n)
      throw std::invalid_argument("QuantumChannel: superoperator must be square with dim^2 rows");
  }

  static QuantumChannel identity(Index d) { return QuantumChannel(ComplexMatrix::Identity(d * d, d * d)); }

  static QuantumChannel from_unitary(const ComplexMatrix& u) { return QuantumChannel(tensor(u, u.conjugate())); }

  /// rho -> p rho + (1 - p) Tr(rho) I / d.
  static QuantumChannel depolarizing(Index d, double p) {
    ComplexMatrix s = p * ComplexMatrix::Identity(d * d, d * d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) s(i * d + i, j * d + j) += (1.0 - p) / static_cast<double>(d);
    return QuantumChannel(std::move(s));
  }

  /// Builds the channel from its action on |i><j|, outputs[i * d + j].
  static QuantumChannel from_basis_outputs(const std::vector<ComplexMatrix>& outputs, double leakage = 0.0) {
    const Index n = static_cast<Index>(outputs.size());
    const Index d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
    ComplexMatrix s(n, n);
    for (Index c = 0; c < n; ++c)
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) s(i * d + j, c) = outputs[static_cast<std::size_t>(c)](i, j);
    return QuantumChannel(std::move(s), leakage);
  }

  Index dim() const { return dim_; }
  const ComplexMatrix& superop() const { return s_; }
  double leakage() const { return leakage_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) throw std::invalid_argument("QuantumChannel::apply: dimension mismatch");
    ComplexVector v(dim_ * dim_);
    for (Index i = 0; i < dim_; ++i)
      for (Index j = 0; j < dim_; ++j) v(i * dim_ + j) = rho(i, j);
    const ComplexVector w = s_ * v;
    ComplexMatrix out(dim_, dim_);
    for (Index i = 0; i < dim_; ++i)
      for (Index j = 0; j < dim_; ++j) out(i, j) = w(i * dim_ + j);
    return out;
  }

  /// `next` applied after this channel.
  QuantumChannel then(const QuantumChannel& next) const {
    if (next.dim_ != dim_) throw std::invalid_argument("QuantumChannel::then: dimension mismatch");
    return QuantumChannel(next.s_ * s_, 1.0 - (1.0 - leakage_) * (1.0 - next.leakage_));
  }

  /// Choi matrix sum_ij |i><j| kron E(|i><j|).
  ComplexMatrix choi() const {
    ComplexMatrix j = ComplexMatrix::Zero(dim_ * dim_, dim_ * dim_);
    for (Index a = 0; a < dim_; ++a)
      for (Index b = 0; b < dim_; ++b) {
        ComplexMatrix e = ComplexMatrix::Zero(dim_, dim_);
        e(a, b) = 1.0;
        j.block(a * dim_, b * dim_, dim_, dim_) = apply(e);
      }
    return j;
  }

  /// max_ij |Tr E(|i><j|) - delta_ij|.
  double trace_preservation_error() const {
    double err = 0.0;
    for (Index i = 0; i < dim_; ++i)
      for (Index j = 0; j < dim_; ++j) {
        Complex tr = 0.0;
        for (Index k = 0; k < dim_; ++k) tr += s_(k * dim_ + k, i * dim_ + j);
        err = std::max(err, std::abs(tr - (i == j ? 1.0 : 0.0)));
      }
    return err;
  }

  double min_choi_eigenvalue() const {
    const ComplexMatrix c = choi();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  ComplexMatrix s_;
  Index dim_ = 0;
  double leakage_ = 0.0;
};

/// Channel on the computational block. Basis inputs |i><j| are embedded in
/// the model space, evolved (unitarily, or by the Lindblad equation when
/// `decoherence` is set) and projected back; leakage is one minus the mean
/// retained population of the computational basis states.
inline QuantumChannel gate_channel(const PulseSchedule& schedule, const DeviceModel& device,
                                   const ErrorInjection& err = {}, bool decoherence = false,
                                   const EvolveOptions& opts = {}) {
  const ScheduleDynamics dyn(apply_error(schedule, err), device, opts, decoherence);
  const Index dc = dyn.comp_dim();
  const ComplexMatrix in = dyn.input_map();
  const ComplexMatrix out = dyn.output_map();
  std::vector<ComplexMatrix> inputs;
  for (Index i = 0; i < dc; ++i)
    for (Index j = 0; j < dc; ++j) inputs.push_back(in.col(i) * in.col(j).adjoint());
  std::vector<ComplexMatrix> evolved;
  if (decoherence && !dyn.collapse().empty()) {
    evolved = propagate_lindblad(std::move(inputs), dyn);
  } else {
    const ComplexMatrix u = propagate_unitary(dyn);
    for (const auto& r : inputs) evolved.push_back(u * r * u.adjoint());
  }
  std::vector<ComplexMatrix> projected;
  double retained = 0.0;
  for (Index i = 0; i < dc; ++i)
    for (Index j = 0; j < dc; ++j) {
      ComplexMatrix r = out * evolved[static_cast<std::size_t>(i * dc + j)] * out.adjoint();
      if (i == j) retained += r.trace().real();
      projected.push_back(std::move(r));
    }
  const double leakage = std::max(0.0, 1.0 - retained / static_cast<double>(dc));
  return QuantumChannel::from_basis_outputs(projected, leakage);
}

/// Average gate fidelity of a channel against a unitary target on the
/// computational block: (d F_pro + 1) / (d + 1) with F_pro = Tr(S_U^dag S) / d^2.
inline double average_gate_fidelity(const QuantumChannel& ch, const ComplexMatrix& target) {
  const double d = static_cast<double>(ch.dim());
  const ComplexMatrix su = tensor(target, target.conjugate());
  const double f_pro = (su.adjoint() * ch.superop()).trace().real() / (d * d);
  return (d * f_pro + 1.0) / (d + 1.0);
}

}  // namespace geoqc
