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

#include "geoqc/evolve.hpp"

#include <gtest/gtest.h>

namespace geoqc {
namespace {

const DeviceModel kIdeal = DeviceModel::reference().without_decoherence();
const DeviceModel kNoisy = DeviceModel::reference();

double unitary_fidelity(const PulseSchedule& s, const ComplexMatrix& target, const ErrorInjection& err = {}) {
  return trace_fidelity(gate_unitary(s, kIdeal, err), target);
}

TEST(PropagateUnitary, EmptyScheduleIsIdentity) {
  PulseSchedule s;
  EXPECT_LT(max_abs(propagate_unitary(s, kIdeal) - identity(2)), 1e-15);
}

TEST(PropagateUnitary, ResonantPiPulseFlips) {
  const ComplexMatrix u = propagate_unitary(dynamical_single_qubit(kPi, 0.0), kIdeal);
  EXPECT_GT(trace_fidelity(u, sigma_x()), 1 - 1e-8);
  EXPECT_LT(unitarity_error(u), 1e-8);
}

TEST(PropagateUnitary, HalvingStepConverges) {
  GateSpec spec;
  spec.theta = 1.0;
  spec.gamma = 0.7;
  spec.varphi = 0.3;
  const ComplexMatrix u1 = propagate_unitary(geometric_single_qubit(spec, 80.0, 0.1), kIdeal);
  const ComplexMatrix u2 = propagate_unitary(geometric_single_qubit(spec, 80.0, 0.05), kIdeal);
  const ComplexMatrix u3 = propagate_unitary(geometric_single_qubit(spec, 80.0, 0.025), kIdeal);
  // Distance modulo global phase.
  auto dist = [](const ComplexMatrix& a, const ComplexMatrix& b) {
    const Complex ph = (a.adjoint() * b).trace();
    return (a * (ph / std::abs(ph)) - b).norm();
  };
  EXPECT_LT(dist(u1, u2), 1e-6);
  EXPECT_LT(dist(u2, u3), 1e-6);
}

TEST(PropagateLindblad, MatchesUnitaryWithoutDecoherence) {
  const PulseSchedule s = named_gate("H", GateKind::geometric);
  ComplexVector v(2);
  v << 0.6, Complex(0.0, 0.8);
  const DensityMatrix rho0{KetState(v)};
  const ComplexMatrix u = propagate_unitary(s, kIdeal);
  const DensityMatrix out = propagate_lindblad(rho0, s, kIdeal);
  EXPECT_LT(max_abs(out.matrix() - u * rho0.matrix() * u.adjoint()), 1e-8);
}

TEST(PropagateLindblad, CoherenceDecaysAtT2Star) {
  ComplexVector v(2);
  v << 1.0, 1.0;
  const DensityMatrix plus(KetState::normalized(v));
  const double t = 1500.0;
  const DensityMatrix out = propagate_lindblad(plus, idle_schedule(t), kNoisy);
  EXPECT_NEAR(std::abs(out.matrix()(0, 1)), 0.5 * std::exp(-t / 1730.0), 1e-6);
  EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-6);
  EXPECT_LT(hermiticity_error(out.matrix()), 1e-9);
}

TEST(PropagateLindblad, TraceAndHermiticityAlongGate) {
  const PulseSchedule s = named_gate("T", GateKind::geometric);
  const DensityMatrix rho0(KetState::basis(2, 0));
  for (double stop : {40.0, 80.0, 160.0}) {
    PulseSchedule part = s;
    part.channels[Channel::xy_a].clear();
    std::size_t have = 0, want = static_cast<std::size_t>(std::llround(stop / s.dt));
    for (const auto& seg : s.channels.at(Channel::xy_a)) {
      if (have + seg.size() > want) break;
      part.channels[Channel::xy_a].push_back(seg);
      have += seg.size();
    }
    const DensityMatrix out = propagate_lindblad(rho0, part, kNoisy);
    EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-6);
  }
}

TEST(ApplyError, NoErrorIsBitIdentical) {
  const PulseSchedule s = named_gate("X/2", GateKind::geometric);
  const PulseSchedule e = apply_error(s, {});
  const auto a = s.flatten(Channel::xy_a), b = e.flatten(Channel::xy_a);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  EXPECT_EQ(e.detuning_mhz, 0.0);
}

TEST(ApplyError, RabiErrorScalesSamplesAndAreas) {
  const PulseSchedule s = named_gate("X", GateKind::geometric);
  const PulseSchedule e = apply_error(s, {0.1, 2.0});
  const auto& a = s.channels.at(Channel::xy_a);
  const auto& b = e.channels.at(Channel::xy_a);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(b[k].area, 1.1 * a[k].area, 1e-12);
    EXPECT_NEAR(b[k].envelope.samples[7], 1.1 * a[k].envelope.samples[7], 1e-12);
  }
  EXPECT_EQ(e.detuning_mhz, 2.0);
}

TEST(ApplyError, GeometricXBeatsDynamicalUnderRabiError) {
  const ComplexMatrix x = named_gate_target("X");
  const ErrorInjection err{0.1, 0.0};
  EXPECT_GE(unitary_fidelity(named_gate("X", GateKind::geometric), x, err),
            unitary_fidelity(named_gate("X", GateKind::dynamical), x, err) - 1e-9);
}

TEST(ApplyError, DetuningOnlyActsOnDrivenQubit) {
  PulseSchedule s = named_gate("X", GateKind::dynamical);
  PulseOptions ob;
  ob.channel = Channel::xy_b;
  const PulseSchedule pair = s.then(idle_schedule(0.0, kDefaultDt, Channel::xy_b));
  const ComplexMatrix u = gate_unitary(pair, kIdeal, {0.0, 3.0}, EvolveOptions{Model::pair_effective, false});
  // B idles: its block must stay the identity in the absence of ZZ.
  const ComplexMatrix reduced_b = partial_trace(u.adjoint() * tensor(identity(2), sigma_z()) * u,
                                                std::vector<Index>{2, 2}, 1) / 2.0;
  EXPECT_LT(max_abs(reduced_b - sigma_z()), 1e-9);
}

TEST(ConfigAEvenness, SingleLoopGatesAreEvenInRabiError) {
  for (const std::string name : {"X", "Y", "X/2", "Y/2", "T"}) {
    const PulseSchedule s = named_gate(name, GateKind::geometric);
    const ComplexMatrix t = named_gate_target(name);
    for (double e : {0.05, 0.1, 0.2}) {
      EXPECT_NEAR(unitary_fidelity(s, t, {e, 0}), unitary_fidelity(s, t, {-e, 0}), 2e-3) << name << " eps=" << e;
    }
  }
}

TEST(ConfigAEvenness, HadamardAsymmetryStaysSmall) {
  // The composite H (two loops about different axes) is not exactly even.
  const PulseSchedule s = named_gate("H", GateKind::geometric);
  const ComplexMatrix t = named_gate_target("H");
  for (double e : {0.05, 0.1}) {
    EXPECT_NEAR(unitary_fidelity(s, t, {e, 0}), unitary_fidelity(s, t, {-e, 0}), 5e-3) << e;
  }
}

TEST(GateChannel, IdentityScheduleIsIdentityChannel) {
  const QuantumChannel ch = gate_channel(idle_schedule(80.0), kIdeal);
  EXPECT_LT(max_abs(ch.superop() - identity(4)), 1e-8);
  EXPECT_EQ(ch.leakage(), 0.0);
}

TEST(GateChannel, DecoherentGeometricXNearCoherenceLimit) {
  PulseOptions ob;
  ob.channel = Channel::xy_b;
  const QuantumChannel ch =
      gate_channel(named_gate("X", GateKind::geometric, GateConfig::A, kDefaultDt, ob), kNoisy, {}, true);
  const double f = average_gate_fidelity(ch, named_gate_target("X"));
  // Idle channel of the same length: 1/2 + exp(-t/T1)/6 + exp(-t/T2)/3.
  const double t = 80.0;
  const double limit = 0.5 + std::exp(-t / 26100.0) / 6.0 + std::exp(-t / 4860.0) / 3.0;
  EXPECT_NEAR(f, limit, 1e-3);
  EXPECT_GT(f, 0.990);
  EXPECT_LT(ch.trace_preservation_error(), 1e-6);
  EXPECT_GT(ch.min_choi_eigenvalue(), -1e-6);
}

TEST(GateChannel, CompositionOfUnitaryChannels) {
  const PulseSchedule a = named_gate("X/2", GateKind::geometric);
  const PulseSchedule b = named_gate("Y/2", GateKind::geometric);
  const QuantumChannel ab = gate_channel(a.then(b), kIdeal);
  const QuantumChannel seq = gate_channel(a, kIdeal).then(gate_channel(b, kIdeal));
  EXPECT_LT(max_abs(ab.superop() - seq.superop()), 1e-7);
}

TEST(GateChannel, ThreeLevelLeakageAndDrag) {
  const DeviceModel d3 = kIdeal.with_levels(3);
  PulseOptions plain;
  plain.anharmonicity_mhz = d3.qubit_a.anharmonicity_mhz;
  const PulseOptions drag = PulseOptions::for_qubit(d3.qubit_a);
  EXPECT_EQ(drag.drag, 1.0);
  const QuantumChannel without =
      gate_channel(named_gate("X", GateKind::dynamical, GateConfig::A, kDefaultDt, plain), d3);
  const QuantumChannel with = gate_channel(named_gate("X", GateKind::dynamical, GateConfig::A, kDefaultDt, drag), d3);
  EXPECT_GT(without.leakage(), 0.0);
  EXPECT_LT(with.leakage(), 0.2 * without.leakage());
}

TEST(QuantumChannel, DepolarizingAndChoi) {
  const QuantumChannel dep = QuantumChannel::depolarizing(2, 0.9);
  const ComplexMatrix out = dep.apply(KetState::basis(2, 0).projector());
  EXPECT_NEAR(out(0, 0).real(), 0.95, 1e-15);
  EXPECT_LT(dep.trace_preservation_error(), 1e-15);
  EXPECT_NEAR(dep.min_choi_eigenvalue(), 0.05, 1e-12);
  const QuantumChannel u = QuantumChannel::from_unitary(sigma_x());
  EXPECT_NEAR(u.apply(KetState::basis(2, 0).projector())(1, 1).real(), 1.0, 1e-15);
}

TEST(EvolveModels, AutomaticResolution) {
  EXPECT_EQ(resolve_model(named_gate("X", GateKind::geometric), Model::automatic), Model::single_a);
  PulseOptions ob;
  ob.channel = Channel::xy_b;
  EXPECT_EQ(resolve_model(named_gate("X", GateKind::geometric, GateConfig::A, kDefaultDt, ob), Model::automatic),
            Model::single_b);
  const PulseSchedule cz = parametric_cz_schedule({150.0, 290.0, 0.0}, 12.0, 0.0);
  EXPECT_EQ(resolve_model(cz, Model::automatic), Model::pair_coupled);
  EXPECT_THROW(ScheduleDynamics(cz, kIdeal, EvolveOptions{Model::single_a}), std::invalid_argument);
}

TEST(DressedFrame, StaticZZNearAnalyticRate) {
  const DressedFrame f(kIdeal);
  EXPECT_NEAR(f.zz_mhz(), zz_rate(kIdeal), 0.1);
  EXPECT_LT(unitarity_error(f.basis), 1e-12);
  // Free evolution without modulation is the ZZ phase only.
  PulseSchedule idle = idle_schedule(100.0, kDefaultDt, Channel::z_a);
  const ComplexMatrix u = gate_unitary(idle, kIdeal, {}, EvolveOptions{Model::pair_coupled});
  EXPECT_LT(max_abs(u - cz_target_unitary(angular(f.zz_mhz()) * -100.0)), 2e-3);
  const ComplexMatrix fine = gate_unitary(idle_schedule(100.0, kDefaultDt / 4, Channel::z_a), kIdeal, {},
                                          EvolveOptions{Model::pair_coupled});
  EXPECT_LT(max_abs(fine - cz_target_unitary(angular(f.zz_mhz()) * -100.0)), 1e-4);
}

}  // namespace
}  // namespace geoqc
