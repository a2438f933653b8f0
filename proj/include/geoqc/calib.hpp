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
#include "geoqc/parallel.hpp"
#include "geoqc/tomo.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <optional>

/// Calibration procedures for the parametric CZ gate and the control-error
/// sweeps of the single-qubit gates.
namespace geoqc {

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Nearest-branch continuation of a phase sequence.
inline std::vector<double> unwrap_phases(const std::vector<double>& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = i == 0 ? p[0] : out[i - 1] + wrap_phase(p[i] - out[i - 1]);
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) throw std::invalid_argument("fit_line: abscissae are all equal");
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

// ---------------------------------------------------------------------------
// Chevron

struct ChevronResult {
  double amp_mhz = 0.0;
  std::vector<double> nu_grid;            // MHz
  std::vector<double> t_grid;             // ns
  std::vector<std::vector<double>> p11;   // [nu][t]
  bool fitted = false;
  double nu_res = 0.0;                    // MHz
  double g_eff = 0.0;                     // MHz
  double residual_rms = 0.0;
};

/// Two-level sideband oracle: population left in |11> after time t at
/// modulation frequency nu.
inline double chevron_model(double nu, double t_ns, double nu_res, double g_eff) {
  const double d = nu - nu_res;
  const double w2 = g_eff * g_eff + d * d;
  if (w2 <= 0.0) return 1.0;
  const double s = std::sin(kPi * std::sqrt(w2) * 1e-3 * t_ns);
  return 1.0 - g_eff * g_eff / w2 * s * s;
}

/// Evolves the dressed |11> under a constant-amplitude modulation of Q_A for
/// every frequency of the grid and records the dressed |11> population at
/// each time of the grid. No fit is attempted.
inline ChevronResult chevron_simulate(const DeviceModel& device, double amp_mhz, const std::vector<double>& nu_grid,
                                      const std::vector<double>& t_grid, double dt = kDefaultDt) {
  if (!(amp_mhz >= 0.0)) throw std::invalid_argument("chevron_scan: amplitude must be >= 0");
  if (nu_grid.empty() || t_grid.empty()) throw std::invalid_argument("chevron_scan: empty grid");
  if (!(dt > 0.0)) throw std::invalid_argument("chevron_scan: dt must be positive");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] < t_grid[i - 1]))
      throw std::invalid_argument("chevron_scan: time grid must be non-negative and ascending");
  for (double nu : nu_grid)
    if (!(nu > 0.0)) throw std::invalid_argument("chevron_scan: modulation frequencies must be > 0");

  const DressedFrame frame(device);
  const PairOperators& ops = frame.ops;
  const ComplexVector start = frame.basis.col(frame.comp[3]);

  ChevronResult out;
  out.amp_mhz = amp_mhz;
  out.nu_grid = nu_grid;
  out.t_grid = t_grid;
  out.p11 = parallel_map<std::vector<double>>(nu_grid.size(), [&](std::size_t i) {
    const double w = angular(nu_grid[i]);
    std::vector<double> row(t_grid.size());
    ComplexVector psi = start;
    std::size_t step = 0;
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      const auto target = static_cast<std::size_t>(std::llround(t_grid[j] / dt));
      for (; step < target; ++step) {
        const double t = (static_cast<double>(step) + 0.5) * dt;
        psi = expm_hermitian(coupled_hamiltonian(device, ops, amp_mhz * std::sin(w * t), t), dt) * psi;
      }
      const Complex a = frame.output_map(static_cast<double>(step) * dt).row(3) * psi;
      row[j] = std::clamp(std::norm(a), 0.0, 1.0);
    }
    return row;
  });
  return out;
}

namespace detail {

struct LeastSquaresFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  int n_inputs, n_values;
  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
};

struct ChevronFunctor : LeastSquaresFunctor {
  const ChevronResult& c;
  explicit ChevronFunctor(const ChevronResult& r)
      : LeastSquaresFunctor{2, static_cast<int>(r.nu_grid.size() * r.t_grid.size())}, c(r) {}

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    Index k = 0;
    for (std::size_t i = 0; i < c.nu_grid.size(); ++i)
      for (std::size_t j = 0; j < c.t_grid.size(); ++j)
        r(k++) = chevron_model(c.nu_grid[i], c.t_grid[j], x(0), x(1)) - c.p11[i][j];
    return 0;
  }
};

inline double chevron_sse(const ChevronResult& c, double nu_res, double g) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.nu_grid.size(); ++i)
    for (std::size_t j = 0; j < c.t_grid.size(); ++j)
      s += std::pow(chevron_model(c.nu_grid[i], c.t_grid[j], nu_res, g) - c.p11[i][j], 2);
  return s;
}

}  // namespace detail

/// Least-squares fit of the sideband oracle to a simulated chevron.
inline void fit_chevron(ChevronResult& c) {
  const std::size_t nn = c.nu_grid.size();
  if (nn < 3 || c.t_grid.size() < 3) throw std::invalid_argument("fit_chevron: need at least 3x3 grid points");
  std::size_t best_row = 0;
  double best_depth = -1.0, deepest = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    double depth = 0.0;
    for (double p : c.p11[i]) depth += 1.0 - p, deepest = std::max(deepest, 1.0 - p);
    if (depth > best_depth) best_depth = depth, best_row = i;
  }
  if (deepest < 0.5) throw std::runtime_error("fit_chevron: no resonance within the scanned frequency range");

  const double nu0 = c.nu_grid[best_row];
  double g0 = 1.0, sse0 = std::numeric_limits<double>::infinity();
  for (double g = 0.25; g <= 60.0; g += 0.25)
    if (const double s = detail::chevron_sse(c, nu0, g); s < sse0) sse0 = s, g0 = g;

  Eigen::VectorXd x(2);
  x << nu0, g0;
  detail::ChevronFunctor fn(c);
  Eigen::NumericalDiff<detail::ChevronFunctor> nd(fn);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::ChevronFunctor>> lm(nd);
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !x.allFinite())
    throw std::runtime_error("fit_chevron: fit did not converge");

  const auto [lo, hi] = std::minmax_element(c.nu_grid.begin(), c.nu_grid.end());
  if (x(0) < *lo || x(0) > *hi)
    throw std::runtime_error("fit_chevron: fitted resonance lies outside the scanned frequency range");
  c.nu_res = x(0);
  c.g_eff = std::abs(x(1));
  c.residual_rms = std::sqrt(detail::chevron_sse(c, c.nu_res, c.g_eff) / static_cast<double>(nn * c.t_grid.size()));
  c.fitted = true;
}

inline ChevronResult chevron_scan(const DeviceModel& device, double amp_mhz, const std::vector<double>& nu_grid,
                                  const std::vector<double>& t_grid, double dt = kDefaultDt) {
  ChevronResult c = chevron_simulate(device, amp_mhz, nu_grid, t_grid, dt);
  fit_chevron(c);
  return c;
}

// ---------------------------------------------------------------------------
// Conditional phases

struct CzPhases {
  double phi01 = 0.0;
  double phi10 = 0.0;
  double phi11 = 0.0;
  double gamma = 0.0;
};

/// (|00> + |01> + |10> + |11>) / 2.
inline ComplexMatrix cz_probe_state() { return ComplexMatrix::Constant(4, 4, 0.25); }

/// Phases of <k|rho|00> for k = 01, 10, 11.
inline CzPhases cz_phases_from_state(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("extract_cz_phases: state must be 4x4");
  for (Index k = 1; k < 4; ++k)
    if (std::abs(rho(k, 0)) < 1e-3)
      throw std::domain_error("extract_cz_phases: coherence with |00> vanishes, phase undefined");
  CzPhases p;
  p.phi01 = std::arg(rho(1, 0));
  p.phi10 = std::arg(rho(2, 0));
  p.phi11 = std::arg(rho(3, 0));
  p.gamma = wrap_phase(p.phi11 - p.phi01 - p.phi10);
  return p;
}

/// Applies the channel to the probe state, reconstructs the output by state
/// tomography (exact probabilities unless a measurement model is given) and
/// reads the phases.
inline CzPhases extract_cz_phases(const QuantumChannel& ch, const std::optional<MeasurementModel>& meas = {},
                                  std::uint64_t seed = 0) {
  if (ch.dim() != 4) throw std::invalid_argument("extract_cz_phases: channel must act on two qubits");
  const ComplexMatrix out = ch.apply(cz_probe_state());
  if (meas) {
    std::mt19937_64 rng(seed);
    return cz_phases_from_state(measure_state(out, *meas, rng).matrix());
  }
  return cz_phases_from_state(state_tomography(tomography_probabilities(out), 2).matrix());
}

/// Direct read-out for a (possibly leaky) computational-block operator.
inline CzPhases extract_cz_phases(const ComplexMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4) throw std::invalid_argument("extract_cz_phases: operator must be 4x4");
  return cz_phases_from_state(u * cz_probe_state() * u.adjoint());
}

// ---------------------------------------------------------------------------
// CZ calibration

struct CzCalibration {
  ModulationParams modulation{150.0, 268.2, 0.0};
  double g_eff_mhz = 10.0;
  double edge = kDefaultCzEdge;
  double delta_phi = 0.0;
  std::array<double, 2> virtual_z{0.0, 0.0};

  PulseSchedule schedule(double dt = kDefaultDt, std::optional<double> dphi = {}) const {
    PulseSchedule s = parametric_cz_schedule(modulation, g_eff_mhz, dphi.value_or(delta_phi), edge, dt);
    s.virtual_z = virtual_z;
    return s;
  }
};

/// Starting point from the static spectrum: nu at the dressed |11> <-> |02>
/// splitting and the sideband coupling including the sqrt(2) matrix element.
inline CzCalibration initial_cz_guess(const DeviceModel& device, double amp_mhz = 150.0) {
  const DressedFrame f(device);
  CzCalibration c;
  c.modulation.amp_mhz = amp_mhz;
  c.modulation.freq_mhz =
      std::abs(f.energies(f.ops.index(0, 2)) - f.energies(f.ops.index(1, 1))) / angular(1.0);
  c.g_eff_mhz = effective_coupling_bosonic(device.g_ab_mhz, c.modulation).g_mhz;
  if (!(c.g_eff_mhz > 0.0)) throw std::invalid_argument("initial_cz_guess: modulation amplitude gives no coupling");
  return c;
}

/// Dressed |11> amplitude left after a single burst.
inline Complex single_burst_amplitude(const DeviceModel& device, const CzCalibration& c, double dt = kDefaultDt) {
  const PulseSchedule s = parametric_cz_schedule(c.modulation, c.g_eff_mhz, 0.0, c.edge, dt, 1);
  const ScheduleDynamics dyn(s, device, EvolveOptions{Model::pair_coupled});
  ComplexVector psi = dyn.input_map().col(3);
  for (std::size_t k = 0; k < dyn.steps(); ++k) psi = expm_hermitian(dyn.hamiltonian(k), dyn.dt()) * psi;
  return (dyn.frame()->output_map(dyn.duration()).row(3) * psi)(0);
}

namespace detail {

struct BurstFunctor : LeastSquaresFunctor {
  const DeviceModel& device;
  CzCalibration base;
  double dt;
  BurstFunctor(const DeviceModel& d, const CzCalibration& c, double step)
      : LeastSquaresFunctor{2, 2}, device(d), base(c), dt(step) {}

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    CzCalibration c = base;
    c.modulation.freq_mhz = x(0);
    c.g_eff_mhz = x(1);
    if (!(x(0) > 0.0) || !(x(1) > 0.0)) {
      r.setConstant(1.0);
      return 0;
    }
    const Complex a = single_burst_amplitude(device, c, dt);
    r << a.real(), a.imag();
    return 0;
  }
};

}  // namespace detail

/// Tunes nu and the burst length (through g_eff) so that one burst moves
/// |11> completely to |02>.
inline CzCalibration refine_cz_burst(const DeviceModel& device, CzCalibration c, double dt = kDefaultDt) {
  Eigen::VectorXd x(2);
  x << c.modulation.freq_mhz, c.g_eff_mhz;
  detail::BurstFunctor fn(device, c, dt);
  Eigen::NumericalDiff<detail::BurstFunctor> nd(fn, 1e-6);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::BurstFunctor>> lm(nd);
  lm.parameters.maxfev = 200;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  lm.minimize(x);
  c.modulation.freq_mhz = x(0);
  c.g_eff_mhz = x(1);
  if (std::norm(single_burst_amplitude(device, c, dt)) > 1e-3)
    throw std::runtime_error("calibrate_cz: burst refinement left more than 1e-3 population in |11>");
  return c;
}

/// Phases of the two-burst gate at a given relative phase, without virtual Z.
inline CzPhases cz_phases_at(const DeviceModel& device, const CzCalibration& c, double dphi, double dt = kDefaultDt) {
  CzCalibration raw = c;
  raw.virtual_z = {0.0, 0.0};
  return extract_cz_phases(gate_unitary(raw.schedule(dt, dphi), device, {}, EvolveOptions{Model::pair_coupled}));
}

/// Relative burst phase giving the requested conditional phase: coarse scan
/// for a bracket, then a bracketing root solve.
inline double solve_delta_phi(const DeviceModel& device, const CzCalibration& c, double gamma, double dt = kDefaultDt) {
  auto f = [&](double dphi) { return wrap_phase(cz_phases_at(device, c, dphi, dt).gamma - gamma); };
  constexpr int kCoarse = 12;
  std::vector<double> xs(kCoarse + 1), fs(kCoarse + 1);
  for (int i = 0; i <= kCoarse; ++i) {
    xs[i] = 2.0 * kPi * i / kCoarse;
    fs[i] = i == kCoarse ? fs[0] : f(xs[i]);
  }
  for (int i = 0; i < kCoarse; ++i) {
    if (fs[i] == 0.0) return xs[i];
    if (fs[i] * fs[i + 1] < 0.0 && std::abs(fs[i] - fs[i + 1]) < kPi) {
      std::uintmax_t iters = 60;
      const auto [a, b] = boost::math::tools::toms748_solve(f, xs[i], xs[i + 1], fs[i], fs[i + 1],
                                                            boost::math::tools::eps_tolerance<double>(40), iters);
      return 0.5 * (a + b);
    }
  }
  throw std::runtime_error("calibrate_cz: conditional phase does not reach the target for any relative phase");
}

/// Full calibration: burst refinement, relative phase for the target
/// conditional phase, and virtual Z cancelling the single-qubit phases.
inline CzCalibration calibrate_cz(const DeviceModel& device, CzCalibration c, double gamma = kPi,
                                  double dt = kDefaultDt, bool refine_burst = true) {
  const DeviceModel ideal = device.without_decoherence();
  if (refine_burst) c = refine_cz_burst(ideal, c, dt);
  c.delta_phi = solve_delta_phi(ideal, c, gamma, dt);
  const CzPhases p = cz_phases_at(ideal, c, c.delta_phi, dt);
  c.virtual_z = {-p.phi10, -p.phi01};
  return c;
}

inline CzCalibration calibrate_cz(const DeviceModel& device, double gamma = kPi, double dt = kDefaultDt) {
  return calibrate_cz(device, initial_cz_guess(device), gamma, dt);
}

// ---------------------------------------------------------------------------
// Phase scans

struct DphiScan {
  std::vector<double> dphi;
  std::vector<CzPhases> phases;
  LineFit gamma_fit;        // unwrapped gamma against dphi
  double drift01 = 0.0;     // max |phi01 - phi01(first)|
  double drift10 = 0.0;
};

inline DphiScan phase_vs_dphi_scan(const DeviceModel& device, const CzCalibration& c,
                                   const std::vector<double>& dphi_values, double dt = kDefaultDt) {
  if (dphi_values.size() < 2) throw std::invalid_argument("phase_vs_dphi_scan: need at least 2 points");
  const DeviceModel ideal = device.without_decoherence();
  DphiScan s;
  s.dphi = dphi_values;
  s.phases = parallel_map<CzPhases>(dphi_values.size(),
                                    [&](std::size_t i) { return cz_phases_at(ideal, c, dphi_values[i], dt); });
  std::vector<double> g;
  for (const auto& p : s.phases) {
    g.push_back(p.gamma);
    s.drift01 = std::max(s.drift01, std::abs(wrap_phase(p.phi01 - s.phases[0].phi01)));
    s.drift10 = std::max(s.drift10, std::abs(wrap_phase(p.phi10 - s.phases[0].phi10)));
  }
  s.gamma_fit = fit_line(s.dphi, unwrap_phases(g));
  return s;
}

struct GateCountScan {
  std::vector<int> counts;
  std::vector<CzPhases> phases;
  std::vector<double> phi11_unwrapped;
  std::vector<double> gamma_unwrapped;
  LineFit phi11_fit;
  LineFit gamma_fit;
};

/// Phases after N repetitions of the calibrated gate (computational block
/// composed N times). Counts are sorted before unwrapping.
inline GateCountScan phase_vs_gatecount_scan(const DeviceModel& device, const CzCalibration& c,
                                             std::vector<int> n_values, double dt = kDefaultDt) {
  if (n_values.size() < 2) throw std::invalid_argument("phase_vs_gatecount_scan: need at least 2 counts");
  std::sort(n_values.begin(), n_values.end());
  if (n_values.front() < 0) throw std::invalid_argument("phase_vs_gatecount_scan: counts must be >= 0");
  const ComplexMatrix u =
      gate_unitary(c.schedule(dt), device.without_decoherence(), {}, EvolveOptions{Model::pair_coupled});
  GateCountScan s;
  s.counts = n_values;
  std::vector<double> x, p11, g;
  for (int n : n_values) {
    ComplexMatrix un = identity(4);
    for (int k = 0; k < n; ++k) un = u * un;
    s.phases.push_back(extract_cz_phases(un));
    x.push_back(n);
    p11.push_back(s.phases.back().phi11);
    g.push_back(s.phases.back().gamma);
  }
  // Continuation across a gap of several gates extrapolates the current slope.
  auto unwrap = [&](const std::vector<double>& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i == 0) {
        out[0] = p[0];
        continue;
      }
      double guess = out[i - 1];
      if (i >= 2) guess += (out[i - 1] - out[i - 2]) / (x[i - 1] - x[i - 2]) * (x[i] - x[i - 1]);
      out[i] = guess + wrap_phase(p[i] - guess);
    }
    return out;
  };
  s.phi11_unwrapped = unwrap(p11);
  s.gamma_unwrapped = unwrap(g);
  s.phi11_fit = fit_line(x, s.phi11_unwrapped);
  s.gamma_fit = fit_line(x, s.gamma_unwrapped);
  return s;
}

// ---------------------------------------------------------------------------
// Control-error sweeps

enum class SweepAxis { rabi, detuning };
enum class SweepKind { geometric_a, geometric_b, dynamical };

inline std::string sweep_axis_name(SweepAxis a) { return a == SweepAxis::rabi ? "rabi" : "detuning"; }

inline SweepAxis sweep_axis_from_name(const std::string& s) {
  if (s == "rabi" || s == "epsilon" || s == "eps") return SweepAxis::rabi;
  if (s == "detuning" || s == "delta") return SweepAxis::detuning;
  throw std::invalid_argument("unknown sweep axis '" + s + "' (expected rabi or detuning)");
}

inline std::string sweep_kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::geometric_a: return "geo-A";
    case SweepKind::geometric_b: return "geo-B";
    case SweepKind::dynamical: return "dyn";
  }
  return "?";
}

inline SweepKind sweep_kind_from_name(const std::string& s) {
  if (s == "geo-A" || s == "geometric-A") return SweepKind::geometric_a;
  if (s == "geo-B" || s == "geometric-B") return SweepKind::geometric_b;
  if (s == "dyn" || s == "dynamical") return SweepKind::dynamical;
  throw std::invalid_argument("unknown gate kind '" + s + "' (expected geo-A, geo-B or dyn)");
}

/// Rabi errors -0.2..0.2 step 0.02; detunings -4..4 MHz step 0.4.
inline std::vector<double> default_sweep_grid(SweepAxis a) {
  const double step = a == SweepAxis::rabi ? 0.02 : 0.4;
  std::vector<double> g;
  for (int k = -10; k <= 10; ++k) g.push_back(k * step);
  return g;
}

struct SweepOptions {
  SweepAxis axis = SweepAxis::rabi;
  std::vector<std::string> gates{"X/2", "H", "T"};
  std::vector<SweepKind> kinds{SweepKind::geometric_a, SweepKind::geometric_b, SweepKind::dynamical};
  std::vector<double> grid;  // empty: default grid for the axis
  bool decoherence = true;
  Channel channel = Channel::xy_b;
  double dt = kDefaultDt;
};

struct SweepCurve {
  std::string gate;
  SweepKind kind = SweepKind::geometric_a;
  std::vector<double> fidelity;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::rabi;
  std::vector<double> error_grid;
  std::vector<SweepCurve> curves;

  const SweepCurve& curve(const std::string& gate, SweepKind kind) const {
    for (const auto& c : curves)
      if (c.gate == gate && c.kind == kind) return c;
    throw std::out_of_range("SweepResult: no curve for " + gate + " " + sweep_kind_name(kind));
  }
};

inline PulseSchedule sweep_schedule(const DeviceModel& device, const std::string& gate, SweepKind kind, Channel channel,
                                    double dt = kDefaultDt) {
  const TransmonParams& q = channel == Channel::xy_b ? device.qubit_b : device.qubit_a;
  const PulseOptions po = PulseOptions::for_qubit(q, channel);
  const GateKind gk = kind == SweepKind::dynamical ? GateKind::dynamical : GateKind::geometric;
  const GateConfig cfg = kind == SweepKind::geometric_b ? GateConfig::B : GateConfig::A;
  return named_gate(gate, gk, cfg, dt, po);
}

/// Process fidelity of one single-qubit gate under one injected error.
inline double gate_process_fidelity(const DeviceModel& device, const std::string& gate, SweepKind kind,
                                    const ErrorInjection& err, bool decoherence, Channel channel = Channel::xy_b,
                                    double dt = kDefaultDt) {
  const PulseSchedule s = sweep_schedule(device, gate, kind, channel, dt);
  const QuantumChannel ch = gate_channel(s, device, err, decoherence);
  return process_fidelity(qpt(ch), chi_from_unitary(named_gate_target(gate)));
}

inline SweepResult noise_sweep(const DeviceModel& device, const SweepOptions& o = {}) {
  if (o.channel == Channel::z_a) throw std::invalid_argument("noise_sweep: gates must play on an xy channel");
  for (const auto& g : o.gates) named_gate_steps(g);
  SweepResult r;
  r.axis = o.axis;
  r.error_grid = o.grid.empty() ? default_sweep_grid(o.axis) : o.grid;
  for (const auto& g : o.gates)
    for (SweepKind k : o.kinds) r.curves.push_back({g, k, std::vector<double>(r.error_grid.size())});
  const std::size_t npts = r.error_grid.size();
  parallel_for(r.curves.size() * npts, [&](std::size_t idx) {
    SweepCurve& c = r.curves[idx / npts];
    const std::size_t j = idx % npts;
    ErrorInjection err;
    (o.axis == SweepAxis::rabi ? err.rabi_scale : err.detuning_mhz) = r.error_grid[j];
    c.fidelity[j] = gate_process_fidelity(device, c.gate, c.kind, err, o.decoherence, o.channel, o.dt);
  });
  return r;
}

}  // namespace geoqc
