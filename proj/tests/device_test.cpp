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

#include "geoqc/device.hpp"
#include "geoqc/device_config.hpp"
#include "geoqc/evolve.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace geoqc {
namespace {

constexpr double kTwoPiMilli = 2.0 * kPi * 1e-3;

TEST(DriveHamiltonian, ZeroDriveIsZero) {
  TransmonParams q;
  EXPECT_EQ(max_abs(drive_hamiltonian(q, 0.0, 0.0, 0.0)), 0.0);
}

TEST(DriveHamiltonian, InPhaseDriveIsSigmaX) {
  TransmonParams q;
  const ComplexMatrix h = drive_hamiltonian(q, 10.0, 0.0, 0.0);
  EXPECT_LT(max_abs(h - kTwoPiMilli * 5.0 * sigma_x()), 1e-15);
}

TEST(DriveHamiltonian, QuadratureDriveIsSigmaY) {
  TransmonParams q;
  const ComplexMatrix h = drive_hamiltonian(q, 10.0, kPi / 2, 0.0);
  EXPECT_LT(max_abs(h - kTwoPiMilli * 5.0 * sigma_y()), 1e-15);
}

TEST(DriveHamiltonian, QutritMatchesHandAssembledOracle) {
  TransmonParams q;
  q.levels = 3;
  q.anharmonicity_mhz = -190.0;
  const double omega = 12.0, phi = 0.3, delta = 1.5;
  const Complex c = kTwoPiMilli * std::polar(omega, phi);
  ComplexMatrix oracle = ComplexMatrix::Zero(3, 3);
  oracle(0, 1) = std::conj(c) / 2.0;
  oracle(1, 0) = c / 2.0;
  oracle(1, 2) = std::sqrt(2.0) * std::conj(c) / 2.0;
  oracle(2, 1) = std::sqrt(2.0) * c / 2.0;
  oracle(1, 1) = kTwoPiMilli * delta;
  oracle(2, 2) = kTwoPiMilli * (2.0 * delta - 190.0);
  const ComplexMatrix h = drive_hamiltonian(q, omega, phi, delta);
  EXPECT_LT(max_abs(h - oracle), 1e-15);
  EXPECT_NEAR(std::abs(h(1, 2)), std::sqrt(2.0) * kTwoPiMilli * omega / 2.0, 1e-15);
  EXPECT_TRUE(is_hermitian(h));
}

TEST(CoupledHamiltonian, NoModulationNoCouplingIsAnharmonicDiagonal) {
  DeviceModel d = DeviceModel::reference();
  d.g_ab_mhz = 0.0;
  const ComplexMatrix h = coupled_hamiltonian(d, ModulationParams{0.0, 268.2, 0.0}, 13.7);
  ComplexMatrix expected = ComplexMatrix::Zero(9, 9);
  expected(2 * 3 + 0, 2 * 3 + 0) = kTwoPiMilli * -202.0;
  expected(0 * 3 + 2, 0 * 3 + 2) = kTwoPiMilli * -190.0;
  expected(2 * 3 + 1, 2 * 3 + 1) = kTwoPiMilli * -202.0;
  expected(1 * 3 + 2, 1 * 3 + 2) = kTwoPiMilli * -190.0;
  expected(2 * 3 + 2, 2 * 3 + 2) = kTwoPiMilli * -392.0;
  EXPECT_LT(max_abs(h - expected), 1e-12);
}

TEST(CoupledHamiltonian, ElevenToZeroTwoElementIsRootTwoG) {
  const DeviceModel d = DeviceModel::reference();
  const PairOperators ops(3, 3);
  for (double t : {0.0, 1.3, 17.9, 100.0}) {
    const ComplexMatrix h = coupled_hamiltonian(d, ModulationParams{0.0, 268.2, 0.0}, t);
    EXPECT_NEAR(std::abs(h(ops.index(0, 2), ops.index(1, 1))), std::sqrt(2.0) * kTwoPiMilli * 16.68, 1e-12);
    EXPECT_TRUE(is_hermitian(h));
  }
}

TEST(CoupledHamiltonian, ModulationAveragesToZeroOverAPeriod) {
  DeviceModel d = DeviceModel::reference();
  d.g_ab_mhz = 0.0;
  const PairOperators ops(3, 3);
  for (double phase : {0.0, 0.7, 2.5}) {
    const ModulationParams m{150.0, 268.2, phase};
    const double period = 1e3 / m.freq_mhz;
    const int n = 4000;
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const ComplexMatrix h = coupled_hamiltonian(d, m, (k + 0.5) * period / n);
      acc += h(ops.index(1, 0), ops.index(1, 0));
    }
    EXPECT_NEAR(std::abs(acc / static_cast<double>(n)), 0.0, 1e-12);
  }
}

TEST(CoupledHamiltonian, StaticExchangeConservesExcitations) {
  const DeviceModel d = DeviceModel::reference();
  const PairOperators ops(3, 3);
  const ComplexMatrix exchange = kTwoPiMilli * d.g_ab_mhz * (ops.a.adjoint() * ops.b + ops.b.adjoint() * ops.a);
  const ComplexMatrix n = ops.na + ops.nb;
  EXPECT_LT(max_abs(exchange * n - n * exchange), 1e-15);
  const ComplexMatrix h = coupled_hamiltonian(d, ModulationParams{0.0, 100.0, 0.0}, 3.3);
  EXPECT_LT(max_abs(h * n - n * h), 1e-12);
}

TEST(CollapseOperators, InfiniteCoherenceHasNoChannels) {
  TransmonParams q;
  EXPECT_TRUE(collapse_operators(q).empty());
  q.t1_us = 10.0;
  q.t2_star_us = 20.0;
  const auto ops = collapse_operators(q);
  ASSERT_EQ(ops.size(), 1u);
  EXPECT_EQ(q.dephasing_rate(), 0.0);
}

TEST(CollapseOperators, OperatingPointDephasingRate) {
  const TransmonParams qb = DeviceModel::reference().qubit_b;
  const double inv_tphi_us = 1.0 / 4.86 - 1.0 / 52.2;
  EXPECT_NEAR(inv_tphi_us, 0.1866, 5e-5);
  EXPECT_NEAR(qb.dephasing_rate() * 1e3, inv_tphi_us, 1e-12);
  const auto ops = collapse_operators(qb);
  ASSERT_EQ(ops.size(), 2u);
  EXPECT_NEAR(std::norm(ops[0](0, 1)), 1.0 / 26100.0, 1e-15);
  EXPECT_NEAR(std::norm(ops[1](1, 1)), 4.0 * qb.dephasing_rate() / 2.0, 1e-15);
}

TEST(CollapseOperators, RejectsUnphysicalCoherence) {
  TransmonParams q;
  q.t1_us = 10.0;
  q.t2_star_us = 25.0;
  EXPECT_THROW(collapse_operators(q), std::invalid_argument);
}

TEST(CollapseOperators, FreeDecayFollowsT1) {
  DeviceModel d = DeviceModel::reference();
  const PulseSchedule idle = idle_schedule(2000.0);
  const DensityMatrix out = propagate_lindblad(DensityMatrix(KetState::basis(2, 1)), idle, d);
  EXPECT_NEAR(out.population(1), std::exp(-2000.0 / 20500.0), 1e-6);
}

TEST(ZZRate, ReferenceDevice) {
  const double zz = zz_rate(DeviceModel::reference());
  EXPECT_NEAR(zz, -1.18, 0.01);
  EXPECT_NEAR(zz * 40.0 * 1e-3 * 360.0, -17.0, 0.5);
}

TEST(ZZRate, VanishesWithoutCoupling) {
  DeviceModel d = DeviceModel::reference();
  d.g_ab_mhz = 0.0;
  EXPECT_EQ(zz_rate(d), 0.0);
}

TEST(ZZRate, SymmetricUnderRelabeling) {
  const DeviceModel d = DeviceModel::reference();
  DeviceModel s = d;
  std::swap(s.qubit_a, s.qubit_b);
  EXPECT_NEAR(zz_rate(d), zz_rate(s), 1e-12);
}

TEST(ZZRate, RejectsStraddledResonance) {
  DeviceModel d = DeviceModel::reference();
  d.qubit_b.freq_ghz = d.qubit_a.freq_ghz - 0.190;
  EXPECT_THROW(zz_rate(d), std::domain_error);
}

TEST(FluxOrthogonalize, InvertsReferenceMatrix) {
  const DeviceModel d = DeviceModel::reference();
  const Eigen::Vector2d x = flux_orthogonalize(d, Eigen::Vector2d(1.0, 0.0));
  const double det = 1.0 + 0.0759 * 0.0800;
  EXPECT_NEAR(x(0), 1.0 / det, 1e-12);
  EXPECT_NEAR(x(1), -0.0800 / det, 1e-12);
  EXPECT_NEAR(x(0), 0.99396, 1e-5);
  EXPECT_NEAR(x(1), -0.07952, 1e-5);
  EXPECT_LT((d.flux_crosstalk * x - Eigen::Vector2d(1.0, 0.0)).norm(), 1e-10);
}

TEST(FluxOrthogonalize, IdentityAndRoundTrip) {
  DeviceModel d = DeviceModel::reference();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector2d v(n(rng), n(rng));
    EXPECT_LT((d.flux_crosstalk * flux_orthogonalize(d, v) - v).norm(), 1e-12);
  }
  d.flux_crosstalk.setIdentity();
  EXPECT_LT((flux_orthogonalize(d, Eigen::Vector2d(0.3, -2.0)) - Eigen::Vector2d(0.3, -2.0)).norm(), 1e-15);
  d.flux_crosstalk << 1.0, 1.0, 1.0, 1.0;
  EXPECT_THROW(flux_orthogonalize(d, Eigen::Vector2d(1.0, 0.0)), std::domain_error);
}

TEST(DeviceModel, ReferenceSatisfiesInvariants) {
  EXPECT_NO_THROW(DeviceModel::reference().validate());
  DeviceModel d = DeviceModel::reference();
  d.readout_matrix(0, 0) = 0.5;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d = DeviceModel::reference();
  d.flux_crosstalk(1, 1) = 0.9;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d = DeviceModel::reference();
  d.qubit_a.anharmonicity_mhz = 5.0;
  EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(DeviceConfig, ShippedFileMatchesReference) {
  const DeviceModel d = load_device_config(GEOQC_DEFAULT_DEVICE);
  const DeviceModel r = DeviceModel::reference();
  EXPECT_EQ(d.qubit_a.freq_ghz, r.qubit_a.freq_ghz);
  EXPECT_EQ(d.qubit_b.t2_star_us, r.qubit_b.t2_star_us);
  EXPECT_EQ(d.g_ab_mhz, r.g_ab_mhz);
  EXPECT_LT((d.flux_crosstalk - r.flux_crosstalk).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((d.readout_matrix - r.readout_matrix).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DeviceConfig, FormatRoundTrips) {
  DeviceModel r = DeviceModel::reference().without_decoherence();
  std::istringstream in(format_device_config(r));
  const DeviceModel d = parse_device_config(in);
  EXPECT_TRUE(std::isinf(d.qubit_a.t1_us));
  EXPECT_EQ(d.qubit_b.anharmonicity_mhz, r.qubit_b.anharmonicity_mhz);
}

TEST(DeviceConfig, DiagnosticsNameTheLine) {
  std::string text = format_device_config(DeviceModel::reference());
  auto expect_error = [](const std::string& cfg, const std::string& fragment) {
    std::istringstream in(cfg);
    try {
      parse_device_config(in, "dev.cfg");
      ADD_FAILURE() << "no error for fragment " << fragment;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_error(text + "bogus.key = 1\n", "dev.cfg:14: unknown key 'bogus.key'");
  expect_error(text + "coupling.g_ab_mhz = 3\n", "duplicate key");
  expect_error("qubit_a.freq_ghz = abc\n", "dev.cfg:1: expected a number");
  expect_error("qubit_a.freq_ghz = 4.6\n", "missing required key");
  std::string bad = text;
  bad.replace(bad.find("[[1, -0.0759]"), 13, "[[2, -0.0759]");
  expect_error(bad, "unit diagonal");
  bad = text;
  bad.replace(bad.find("[[1, -0.0759]"), 13, "[[1, -0.0759, 3]");
  expect_error(bad, "row 0 must have 2 entries");
}

}  // namespace
}  // namespace geoqc
