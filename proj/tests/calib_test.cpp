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

#include "geoqc/calib.hpp"

#include <gtest/gtest.h>

#include <random>

namespace geoqc {
namespace {

const DeviceModel kIdeal = DeviceModel::reference().without_decoherence();

const CzCalibration& calibrated() {
  static const CzCalibration c = calibrate_cz(kIdeal);
  return c;
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  for (int k = 0; lo + k * step <= hi + 1e-9; ++k) v.push_back(lo + k * step);
  return v;
}

ComplexMatrix diag_phases(double p01, double p10, double p11, double global = 0.0) {
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(0, 0) = std::polar(1.0, global);
  u(1, 1) = std::polar(1.0, global + p01);
  u(2, 2) = std::polar(1.0, global + p10);
  u(3, 3) = std::polar(1.0, global + p11);
  return u;
}

TEST(Phases, WrapAndUnwrap) {
  EXPECT_NEAR(wrap_phase(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_phase(-kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_phase(0.3 - 4 * kPi), 0.3, 1e-12);
  std::vector<double> raw;
  for (int k = 0; k < 10; ++k) raw.push_back(wrap_phase(1.1 * k));
  const auto u = unwrap_phases(raw);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(u[k], 1.1 * k, 1e-12);
}

TEST(Chevron, OracleOnResonance) {
  for (double t : {0.0, 10.0, 25.0, 40.0}) EXPECT_NEAR(chevron_model(290, t, 290, 12.5), std::pow(std::cos(kPi * 12.5e-3 * t), 2), 1e-14);
}

TEST(Chevron, ZeroAmplitudeLeavesElevenAlone) {
  const ChevronResult c = chevron_simulate(kIdeal, 0.0, {280, 290, 300}, range(0, 60, 5));
  for (const auto& row : c.p11)
    for (double p : row) EXPECT_GT(p, 1.0 - 1e-6);
  EXPECT_THROW(chevron_scan(kIdeal, 0.0, {280, 290, 300}, range(0, 60, 5)), std::runtime_error);
}

TEST(Chevron, GridMissingResonanceFails) {
  EXPECT_THROW(chevron_scan(kIdeal, 150.0, range(200, 220, 10), range(0, 80, 4)), std::runtime_error);
}

TEST(Chevron, LocatesSidebandResonance) {
  const ChevronResult c = chevron_scan(kIdeal, 150.0, range(276, 306, 2), range(0, 120, 2));
  EXPECT_GE(c.nu_res, 260.0);
  EXPECT_LE(c.nu_res, 295.0);
  EXPECT_GE(c.g_eff, 8.0);
  EXPECT_LE(c.g_eff, 13.0);
  EXPECT_LT(c.residual_rms, 0.02);
  for (const auto& row : c.p11)
    for (double p : row) EXPECT_TRUE(p >= 0.0 && p <= 1.0);
}

// Dominant frequency of a trace by scanning a least-squares cosine fit.
double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi) {
  double best_f = lo, best = -1.0;
  for (double f = lo; f <= hi; f += 0.01) {
    Eigen::MatrixXd a(t.size(), 3);
    Eigen::VectorXd b(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double ph = 2 * kPi * f * 1e-3 * t[i];
      a.row(i) << 1.0, std::cos(ph), std::sin(ph);
      b(i) = y[i];
    }
    const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    const double explained = (a * x).squaredNorm();
    if (explained > best) best = explained, best_f = f;
  }
  return best_f;
}

TEST(Chevron, OffResonantRabiFrequency) {
  const ChevronResult c = chevron_scan(kIdeal, 150.0, range(280, 300, 2), range(0, 100, 2));
  const double delta = 12.0;
  const auto t = range(0, 200, 0.5);
  const ChevronResult row = chevron_simulate(kIdeal, 150.0, {c.nu_res + delta}, t);
  const double f = dominant_frequency(t, row.p11[0], 5.0, 40.0);
  EXPECT_NEAR(f, std::hypot(c.g_eff, delta), 0.03 * std::hypot(c.g_eff, delta));
}

TEST(CzPhases, IdealCz) {
  const CzPhases p = extract_cz_phases(QuantumChannel::from_unitary(cz_target_unitary(kPi)));
  EXPECT_NEAR(p.phi01, 0.0, 1e-8);
  EXPECT_NEAR(p.phi10, 0.0, 1e-8);
  EXPECT_NEAR(std::abs(p.phi11), kPi, 1e-8);
  EXPECT_NEAR(std::abs(p.gamma), kPi, 1e-8);
}

TEST(CzPhases, Identity) {
  const CzPhases p = extract_cz_phases(QuantumChannel::identity(4));
  EXPECT_NEAR(p.phi01, 0.0, 1e-8);
  EXPECT_NEAR(p.phi10, 0.0, 1e-8);
  EXPECT_NEAR(p.phi11, 0.0, 1e-8);
  EXPECT_NEAR(p.gamma, 0.0, 1e-8);
}

TEST(CzPhases, RandomForwardConstruction) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 50; ++i) {
    const double g0 = u(rng), a = u(rng), b = u(rng);
    const ComplexMatrix m = diag_phases(a, b, a + b + g0, u(rng));
    const CzPhases p = extract_cz_phases(QuantumChannel::from_unitary(m));
    EXPECT_NEAR(wrap_phase(p.gamma - g0), 0.0, 1e-8);
    EXPECT_NEAR(wrap_phase(p.phi01 - a), 0.0, 1e-8);
    EXPECT_NEAR(wrap_phase(p.phi10 - b), 0.0, 1e-8);
    EXPECT_NEAR(wrap_phase(p.gamma - wrap_phase(p.phi11 - p.phi01 - p.phi10)), 0.0, 1e-12);
  }
}

TEST(CzPhases, VanishingCoherenceIsAnError) {
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(0, 0) = 0.5;
  rho(3, 3) = 0.5;
  EXPECT_THROW(cz_phases_from_state(rho), std::domain_error);
}

TEST(CzCalibration, InitialGuessNearSideband) {
  const CzCalibration g = initial_cz_guess(kIdeal);
  EXPECT_NEAR(g.modulation.freq_mhz, 290.0, 5.0);
  EXPECT_GT(g.g_eff_mhz, 8.0);
  EXPECT_LT(g.g_eff_mhz, 14.0);
}

TEST(CzCalibration, CalibratedGateIsCz) {
  const CzCalibration& c = calibrated();
  EXPECT_LT(std::norm(single_burst_amplitude(kIdeal, c)), 1e-3);
  const ComplexMatrix u = gate_unitary(c.schedule(), kIdeal, {}, EvolveOptions{Model::pair_coupled});
  const CzPhases p = extract_cz_phases(u);
  EXPECT_NEAR(std::abs(p.gamma), kPi, 1e-2);
  EXPECT_NEAR(p.phi01, 0.0, 1e-6);
  EXPECT_NEAR(p.phi10, 0.0, 1e-6);
  const QuantumChannel ch = gate_channel(c.schedule(), kIdeal, {}, false, EvolveOptions{Model::pair_coupled});
  EXPECT_GT(process_fidelity(qpt(ch), chi_from_unitary(cz_target_unitary(kPi))), 0.999);
}

TEST(CzCalibration, DeltaPhiScanIsLinear) {
  const DphiScan s = phase_vs_dphi_scan(kIdeal, calibrated(), range(0.0, 2.0, 0.25));
  EXPECT_NEAR(std::abs(s.gamma_fit.slope), 1.0, 0.05);
  EXPECT_LT(s.drift01, 0.1);
  EXPECT_LT(s.drift10, 0.1);
}

TEST(CzCalibration, GateCountScan) {
  const GateCountScan s = phase_vs_gatecount_scan(kIdeal, calibrated(), {0, 1, 2, 3, 4, 5, 6});
  EXPECT_NEAR(s.phases[0].phi01, 0.0, 1e-12);
  EXPECT_NEAR(s.phases[0].phi11, 0.0, 1e-12);
  EXPECT_NEAR(s.phases[0].gamma, 0.0, 1e-12);
  EXPECT_NEAR(wrap_phase(s.phases[2].gamma), 0.0, 2e-2);
  EXPECT_NEAR(std::abs(s.gamma_fit.slope), kPi, 1e-3);
  EXPECT_NEAR(std::abs(s.phi11_fit.slope), kPi, 1e-3);
}

TEST(CzCalibration, IdealGateCountOracle) {
  // Repeated ideal CZ: slope exactly pi.
  std::vector<double> g;
  for (int n = 0; n < 6; ++n) {
    ComplexMatrix u = identity(4);
    for (int k = 0; k < n; ++k) u = cz_target_unitary(kPi) * u;
    g.push_back(n == 0 ? 0.0 : extract_cz_phases(u).gamma);
  }
  std::vector<double> x{0, 1, 2, 3, 4, 5};
  std::vector<double> uw(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double guess = i < 2 ? (i == 0 ? g[0] : g[1]) : 2 * uw[i - 1] - uw[i - 2];
    uw[i] = i == 0 ? g[0] : guess + wrap_phase(g[i] - guess);
  }
  EXPECT_NEAR(std::abs(fit_line(x, uw).slope), kPi, 1e-12);
}

TEST(NoiseSweep, DefaultGrids) {
  const auto r = default_sweep_grid(SweepAxis::rabi);
  ASSERT_EQ(r.size(), 21u);
  EXPECT_NEAR(r.front(), -0.2, 1e-15);
  EXPECT_NEAR(r[10], 0.0, 1e-15);
  const auto d = default_sweep_grid(SweepAxis::detuning);
  EXPECT_NEAR(d.back(), 4.0, 1e-12);
}

TEST(NoiseSweep, ZeroErrorIsExact) {
  SweepOptions o;
  o.grid = {0.0};
  o.decoherence = false;
  for (SweepAxis a : {SweepAxis::rabi, SweepAxis::detuning}) {
    o.axis = a;
    const SweepResult r = noise_sweep(kIdeal, o);
    EXPECT_EQ(r.curves.size(), 9u);
    for (const auto& c : r.curves) EXPECT_GT(c.fidelity[0], 1.0 - 1e-6) << c.gate << " " << sweep_kind_name(c.kind);
  }
}

TEST(NoiseSweep, GeometricBeatsDynamicalUnderRabiError) {
  SweepOptions o;
  o.grid = {-0.1, 0.1};
  o.decoherence = false;
  o.kinds = {SweepKind::geometric_a, SweepKind::dynamical};
  const SweepResult r = noise_sweep(kIdeal, o);
  for (const std::string g : {"X/2", "H", "T"})
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_GE(r.curve(g, SweepKind::geometric_a).fidelity[j], r.curve(g, SweepKind::dynamical).fidelity[j]) << g;
}

TEST(NoiseSweep, MaximumAtZeroError) {
  SweepOptions o;
  o.decoherence = false;
  o.gates = {"X/2"};
  o.grid = range(-0.2, 0.2, 0.05);
  const SweepResult r = noise_sweep(kIdeal, o);
  for (const auto& c : r.curves) {
    const auto it = std::max_element(c.fidelity.begin(), c.fidelity.end());
    EXPECT_NEAR(r.error_grid[static_cast<std::size_t>(it - c.fidelity.begin())], 0.0, 0.05 + 1e-9);
  }
}

TEST(NoiseSweep, DecoherenceLowersFidelity) {
  SweepOptions o;
  o.grid = {0.0};
  o.gates = {"X/2"};
  o.kinds = {SweepKind::geometric_a};
  const double with = noise_sweep(DeviceModel::reference(), o).curves[0].fidelity[0];
  EXPECT_LT(with, 0.999);
  EXPECT_GT(with, 0.98);
}

TEST(NoiseSweep, NamesRoundTrip) {
  for (SweepKind k : {SweepKind::geometric_a, SweepKind::geometric_b, SweepKind::dynamical})
    EXPECT_EQ(sweep_kind_from_name(sweep_kind_name(k)), k);
  EXPECT_EQ(sweep_axis_from_name("detuning"), SweepAxis::detuning);
  EXPECT_THROW(sweep_axis_from_name("phase"), std::invalid_argument);
  EXPECT_THROW(sweep_kind_from_name("geo-C"), std::invalid_argument);
}

}  // namespace
}  // namespace geoqc
