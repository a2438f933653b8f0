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

#include "geoqc/calib.hpp"
#include "geoqc/device_config.hpp"
#include "geoqc/rb.hpp"
#include "geoqc/schedule_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#ifndef GEOQC_VERSION
#define GEOQC_VERSION "0.0.0"
#endif

/// Experiment runner behind the `geoqc` executable.
///
///   geoqc [run] <experiment> [options]
///
/// Every run writes its tables into --out together with manifest.json, which
/// records the experiment, its canonical parameters, the device config hash,
/// the seed and the artifact version. Nothing time- or host-dependent is
/// written, so equal inputs give byte-identical files.
namespace geoqc {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"qpt",   "rb",      "rb2",      "simul-rb", "sweep",
                                              "chevron", "cz-phase", "compile", "verify"};
  return names;
}

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> parameters;
  std::string device_path;  // empty: built-in reference device
  std::string output_path = ".";
  std::uint64_t seed = 0;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string fmt_num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// "lo:hi:step" or a comma-separated list.
inline std::vector<double> parse_grid(const std::string& text, const std::string& option) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(option + ": '" + s + "' is not a number");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument(option + ": range must be lo:hi:step");
    const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument(option + ": range needs step > 0 and hi >= lo");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    if (n > 100000) throw std::invalid_argument(option + ": range has too many points");
    for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(num(p));
  if (out.empty()) throw std::invalid_argument(option + ": empty list");
  return out;
}

inline std::vector<std::size_t> parse_counts(const std::string& text, const std::string& option, std::size_t min) {
  std::vector<std::size_t> out;
  for (double v : parse_grid(text, option)) {
    if (v < static_cast<double>(min) || v != std::floor(v) || v > 1e7)
      throw std::invalid_argument(option + ": values must be integers >= " + std::to_string(min));
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

inline std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');)
    if (!p.empty()) out.push_back(p);
  return out;
}

/// File-name form of a gate name: X/2 -> X2, -Y/2 -> mY2.
inline std::string gate_file_tag(const std::string& g) {
  std::string out;
  for (char c : g) {
    if (c == '-') out += 'm';
    else if (c != '/') out += c;
  }
  return out;
}

namespace detail {

class RunContext {
 public:
  RunContext(ExperimentConfig cfg, DeviceModel device, std::ostream& log)
      : cfg_(std::move(cfg)), device_(std::move(device)), log_(log) {
    std::filesystem::create_directories(cfg_.output_path);
  }

  const ExperimentConfig& config() const { return cfg_; }
  const DeviceModel& device() const { return device_; }
  std::ostream& log() { return log_; }

  std::string path(const std::string& name) const { return (std::filesystem::path(cfg_.output_path) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path(name) + "'");
    f << content;
    outputs_.push_back(name);
  }

  std::string config_hash() const {
    std::string canon = format_device_config(device_) + "experiment=" + cfg_.experiment + "\n";
    for (const auto& [k, v] : cfg_.parameters) canon += k + "=" + v + "\n";
    canon += "seed=" + std::to_string(cfg_.seed) + "\n";
    return hex64(fnv1a(canon));
  }

  void write_manifest() {
    nlohmann::json m;
    m["experiment"] = cfg_.experiment;
    m["parameters"] = cfg_.parameters;
    m["device"] = cfg_.device_path.empty() ? "<built-in reference>" : cfg_.device_path;
    m["config_hash"] = config_hash();
    m["seed"] = cfg_.seed;
    m["version"] = GEOQC_VERSION;
    m["outputs"] = outputs_;
    std::ofstream f(path("manifest.json"), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write manifest in '" + cfg_.output_path + "'");
    f << m.dump(2) << "\n";
  }

 private:
  ExperimentConfig cfg_;
  DeviceModel device_;
  std::ostream& log_;
  std::vector<std::string> outputs_;
};

inline std::string rb_table(const RBDataset& d, const DecayFit& fit, const BootstrapResult& boot, double gpc,
                            const std::string& title) {
  std::ostringstream o;
  o << "# " << title << "\n";
  o << "m\tmean_F\tstd_F";
  for (std::size_t s = 0; s < d.k(); ++s) o << "\tF_" << s;
  o << "\n";
  const auto mu = d.means();
  const auto sd = d.stddevs();
  for (std::size_t i = 0; i < d.m_values.size(); ++i) {
    o << d.m_values[i] << "\t" << fmt_num(mu[i]) << "\t" << fmt_num(sd[i]);
    for (double f : d.fidelities[i]) o << "\t" << fmt_num(f);
    o << "\n";
  }
  const Index dim = qubit_dim(d.n_qubits);
  o << "\n# summary\n";
  o << "A\t" << fmt_num(fit.a) << "\n";
  o << "p\t" << fmt_num(fit.p) << "\n";
  o << "B\t" << fmt_num(fit.b) << "\n";
  o << "sigma_p_fit\t" << fmt_num(fit.sigma_p) << "\n";
  o << "sigma_p_bootstrap\t" << fmt_num(boot.sigma_p) << "\n";
  o << "sigma_A_bootstrap\t" << fmt_num(boot.sigma_a) << "\n";
  o << "sigma_B_bootstrap\t" << fmt_num(boot.sigma_b) << "\n";
  o << "error_per_clifford\t" << fmt_num(error_per_clifford(fit.p, dim)) << "\n";
  o << "F_clifford\t" << fmt_num(reference_fidelity(fit.p, dim)) << "\n";
  if (gpc != 1.0) o << "F_avg_per_gate\t" << fmt_num(reference_fidelity(fit.p, dim, gpc)) << "\n";
  return o.str();
}

}  // namespace detail

/// Parses argv, runs one experiment and returns the process exit status:
/// 0 success, 1 verification failure, 2 usage or configuration error,
/// 3 runtime failure.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  if (!args.empty() && args.front() == "run") args.erase(args.begin());

  CLI::App app{"Pulse-level simulator for geometric single-qubit gates and a parametric CZ", "geoqc"};
  app.set_version_flag("--version", std::string(GEOQC_VERSION));
  app.require_subcommand(1, 1);
  app.fallthrough();

  ExperimentConfig cfg;
  std::string device_path, decoherence = "on", shots = "inf";
  double dt = kDefaultDt;
  app.add_option("--device", device_path, "Device config file (default: $GEOQC_DEVICE, then the shipped config)");
  app.add_option("--out", cfg.output_path, "Output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--decoherence", decoherence, "on|off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  app.add_option("--dt", dt, "Sample spacing in ns")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--shots", shots, "Shots per measurement setting, or inf for exact probabilities")
      ->capture_default_str();

  // Experiment-specific options.
  std::string gate = "X", kind = "geo-A", qubit = "B", readout = "off";
  double rabi_error = 0.0, detuning = 0.0;
  std::string m_list, k_text = "20", interleave;
  std::size_t bootstrap = 200;
  std::string axis = "rabi", gates = "X/2,H,T", kinds = "geo-A,geo-B,dyn", grid;
  double amp = 150.0;
  std::string nu_grid = "276:306:2", t_grid = "0:120:2";
  std::string mode = "all", dphi_grid = "0:6.2:0.4", counts = "0:10:1";
  std::string zz = "on";
  std::optional<double> theta, gamma, phi;
  std::string file;

  auto add_gate_opts = [&](CLI::App* s, bool with_errors) {
    s->add_option("--kind", kind, "geo-A|geo-B|dyn")->capture_default_str();
    s->add_option("--qubit", qubit, "A|B")->check(CLI::IsMember({"A", "B"}))->capture_default_str();
    if (with_errors) {
      s->add_option("--rabi-error", rabi_error, "Relative Rabi error epsilon")->capture_default_str();
      s->add_option("--detuning", detuning, "Static detuning in MHz")->capture_default_str();
    }
  };
  auto add_rb_opts = [&](CLI::App* s) {
    s->add_option("--m", m_list, "Sequence lengths, list or lo:hi:step");
    s->add_option("--k", k_text, "Sequences per length")->capture_default_str();
    s->add_option("--bootstrap", bootstrap, "Bootstrap resamples")->capture_default_str();
  };

  CLI::App* qpt_cmd = app.add_subcommand("qpt", "Process tomography of one gate");
  qpt_cmd->add_option("--gate", gate, "Named gate or CZ")->capture_default_str();
  add_gate_opts(qpt_cmd, true);
  qpt_cmd->add_option("--readout", readout, "Apply and correct the device readout matrix: on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();

  CLI::App* rb_cmd = app.add_subcommand("rb", "Single-qubit randomized benchmarking");
  add_gate_opts(rb_cmd, true);
  add_rb_opts(rb_cmd);
  rb_cmd->add_option("--interleave", interleave, "Gate interleaved after every Clifford");

  CLI::App* rb2_cmd = app.add_subcommand("rb2", "Two-qubit randomized benchmarking with the calibrated CZ");
  add_rb_opts(rb2_cmd);
  rb2_cmd->add_option("--kind", kind, "Single-qubit gate kind: geo-A|geo-B|dyn")->capture_default_str();
  rb2_cmd->add_option("--interleave", interleave, "CZ to add an interleaved run");
  rb2_cmd->add_option("--zz", zz, "Static ZZ coupling during single-qubit layers on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();

  CLI::App* simul_cmd = app.add_subcommand("simul-rb", "Simultaneous single-qubit RB on the pair");
  add_rb_opts(simul_cmd);
  simul_cmd->add_option("--kind", kind, "geo-A|geo-B|dyn")->capture_default_str();
  simul_cmd->add_option("--zz", zz, "Static ZZ coupling on|off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Process fidelity against a control error");
  sweep_cmd->add_option("--axis", axis, "rabi|detuning")->capture_default_str();
  sweep_cmd->add_option("--gates", gates, "Comma-separated gate names")->capture_default_str();
  sweep_cmd->add_option("--kinds", kinds, "Comma-separated kinds")->capture_default_str();
  sweep_cmd->add_option("--grid", grid, "Error grid, list or lo:hi:step (default depends on the axis)");
  sweep_cmd->add_option("--qubit", qubit, "A|B")->check(CLI::IsMember({"A", "B"}))->capture_default_str();

  CLI::App* chevron_cmd = app.add_subcommand("chevron", "Sideband chevron scan and fit");
  chevron_cmd->add_option("--amp", amp, "Modulation amplitude in MHz")->capture_default_str();
  chevron_cmd->add_option("--nu", nu_grid, "Modulation frequencies in MHz")->capture_default_str();
  chevron_cmd->add_option("--t", t_grid, "Durations in ns")->capture_default_str();

  CLI::App* cz_cmd = app.add_subcommand("cz-phase", "CZ calibration and phase scans");
  cz_cmd->add_option("--mode", mode, "all|calibrate|dphi|count")
      ->check(CLI::IsMember({"all", "calibrate", "dphi", "count"}))
      ->capture_default_str();
  cz_cmd->add_option("--amp", amp, "Modulation amplitude in MHz")->capture_default_str();
  cz_cmd->add_option("--dphi", dphi_grid, "Relative phases for the dphi scan")->capture_default_str();
  cz_cmd->add_option("--counts", counts, "Gate counts for the count scan")->capture_default_str();

  CLI::App* compile_cmd = app.add_subcommand("compile", "Write the schedule of a gate");
  compile_cmd->add_option("--gate", gate, "Named gate or CZ")->capture_default_str();
  compile_cmd->add_option("--theta", theta, "Loop axis polar angle (explicit gate)");
  compile_cmd->add_option("--gamma", gamma, "Geometric phase (explicit gate)");
  compile_cmd->add_option("--phi", phi, "Loop axis azimuth (explicit gate)");
  add_gate_opts(compile_cmd, false);
  compile_cmd->add_option("--file", file, "Output schedule path (default: <out>/schedule_<gate>.json)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Simulate a schedule file against its embedded target");
  verify_cmd->add_option("--file", file, "Schedule file")->required();

  const auto first = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  const auto& known = experiment_names();
  if (first != args.end() && first == args.begin() && std::find(known.begin(), known.end(), *first) == known.end()) {
    std::string list;
    for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
    err << "geoqc: unknown experiment '" << *first << "' (expected one of " << list << ")\n";
    return 2;
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << GEOQC_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "geoqc: " << e.what() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.experiment = sub->get_name();

  DeviceModel device;
  std::uint64_t shot_count = 0;
  bool decoh = decoherence == "on";
  try {
    if (device_path.empty())
      if (const char* env = std::getenv("GEOQC_DEVICE")) device_path = env;
#ifdef GEOQC_DEFAULT_DEVICE
    if (device_path.empty() && std::filesystem::exists(GEOQC_DEFAULT_DEVICE)) device_path = GEOQC_DEFAULT_DEVICE;
#endif
    device = device_path.empty() ? DeviceModel::reference() : load_device_config(device_path);
    cfg.device_path = device_path;
    if (shots != "inf") {
      const auto v = parse_counts(shots, "--shots", 1);
      if (v.size() != 1) throw std::invalid_argument("--shots: expected a single count or inf");
      shot_count = v[0];
    }
  } catch (const std::exception& e) {
    err << "geoqc: " << e.what() << "\n";
    return 2;
  }
  if (!decoh) device = device.without_decoherence();

  auto& p = cfg.parameters;
  p["decoherence"] = decoherence;
  p["dt"] = fmt_num(dt);
  p["shots"] = shots;
  const Channel channel = qubit == "A" ? Channel::xy_a : Channel::xy_b;
  const int qubit_index = qubit == "A" ? 0 : 1;
  auto gate_kind = [&] {
    const SweepKind k = sweep_kind_from_name(kind);
    GateSetOptions o;
    o.kind = k == SweepKind::dynamical ? GateKind::dynamical : GateKind::geometric;
    o.config = k == SweepKind::geometric_b ? GateConfig::B : GateConfig::A;
    o.decoherence = decoh;
    o.dt = dt;
    return o;
  };

  try {
    if (cfg.experiment == "verify") {
      const CompiledSchedule c = read_schedule(file);
      const ScheduleVerification v = verify_schedule(c, device);
      out << "fidelity\t" << fmt_num(v.fidelity) << "\n";
      out << "leakage\t" << fmt_num(v.leakage) << "\n";
      out << "target_identity\t" << (v.target_is_identity ? "yes" : "no") << "\n";
      out << "simulated_identity\t" << (v.simulated_is_identity ? "yes" : "no") << "\n";
      if (v.target_is_identity && v.simulated_is_identity) out << "schedule implements the identity\n";
      if (v.fidelity < 1.0 - 1e-6) {
        err << "geoqc: schedule does not reproduce its target (fidelity " << fmt_num(v.fidelity) << ")\n";
        return 1;
      }
      return 0;
    }

    detail::RunContext ctx(cfg, device, err);
    auto finish = [&](detail::RunContext& c) {
      c.write_manifest();
      out << "wrote " << c.config().output_path << " (config " << c.config_hash() << ")\n";
      return 0;
    };

    if (cfg.experiment == "qpt") {
      p["gate"] = gate;
      p["kind"] = kind;
      p["qubit"] = qubit;
      p["rabi_error"] = fmt_num(rabi_error);
      p["detuning"] = fmt_num(detuning);
      p["readout"] = readout;
      detail::RunContext run(cfg, device, err);
      QuantumChannel ch;
      ComplexMatrix target;
      ErrorInjection e{rabi_error, detuning};
      if (gate == "CZ") {
        const CzCalibration cal = calibrate_cz(device, kPi, dt);
        ch = gate_channel(cal.schedule(dt), device, e, decoh, EvolveOptions{Model::pair_coupled});
        target = cz_target_unitary(kPi);
      } else {
        const GateSetOptions o = gate_kind();
        const PulseOptions po = PulseOptions::for_qubit(qubit_index == 0 ? device.qubit_a : device.qubit_b, channel);
        ch = gate_channel(named_gate(gate, o.kind, o.config, dt, po), device, e, decoh);
        target = named_gate_target(gate);
      }
      const int n = ch.dim() == 4 ? 2 : 1;
      ProcessMatrix chi;
      if (shot_count > 0 || readout == "on") {
        MeasurementModel meas;
        meas.shots = shot_count;
        if (readout == "on") {
          meas.readout = n == 2 ? ReadoutModel::from_device(device) : ReadoutModel::from_device(device).marginal(qubit_index);
          meas.apply_readout = meas.correct_readout = true;
        } else {
          meas.readout = ReadoutModel::ideal(n);
        }
        chi = qpt_tomographic([&](const ComplexMatrix& r) { return ch.apply(r); }, n, meas, cfg.seed);
      } else {
        chi = qpt(ch);
      }
      const double fp = process_fidelity(chi, chi_from_unitary(target));
      nlohmann::json j = chi_to_json(chi);
      j["gate"] = gate;
      j["process_fidelity"] = fp;
      j["average_fidelity"] = average_from_process_fidelity(fp, ch.dim());
      j["leakage"] = ch.leakage();
      const std::string tag = "qpt_" + gate_file_tag(gate);
      run.write(tag + ".json", j.dump(1) + "\n");
      std::ostringstream t;
      const auto labels = chi_labels(n);
      t << "row\tcol\tre\tim\n";
      for (Index r = 0; r < chi.chi.rows(); ++r)
        for (Index c = 0; c < chi.chi.cols(); ++c)
          t << labels[static_cast<std::size_t>(r)] << "\t" << labels[static_cast<std::size_t>(c)] << "\t"
            << fmt_num(chi.chi(r, c).real()) << "\t" << fmt_num(chi.chi(r, c).imag()) << "\n";
      t << "\n# summary\nprocess_fidelity\t" << fmt_num(fp) << "\naverage_fidelity\t"
        << fmt_num(average_from_process_fidelity(fp, ch.dim())) << "\n";
      run.write(tag + ".tsv", t.str());
      out << gate << " process fidelity " << fmt_num(fp) << "\n";
      return finish(run);
    }

    if (cfg.experiment == "rb" || cfg.experiment == "rb2" || cfg.experiment == "simul-rb") {
      RBOptions o;
      if (!m_list.empty()) o.m_values = parse_counts(m_list, "--m", 1);
      else if (cfg.experiment == "rb2") o.m_values = {1, 2, 4, 6, 8, 12, 16, 20};
      const auto kv = parse_counts(k_text, "--k", 1);
      if (kv.size() != 1) throw std::invalid_argument("--k: expected a single count");
      o.k = kv[0];
      o.seed = cfg.seed;
      if (bootstrap < 100) throw std::invalid_argument("--bootstrap: need at least 100 resamples");
      std::string ms;
      for (auto m : o.m_values) ms += (ms.empty() ? "" : ",") + std::to_string(m);
      p["m"] = ms;
      p["k"] = std::to_string(o.k);
      p["kind"] = kind;
      p["bootstrap"] = std::to_string(bootstrap);
      const GateSetOptions go = gate_kind();

      if (cfg.experiment == "rb") {
        p["qubit"] = qubit;
        p["rabi_error"] = fmt_num(rabi_error);
        p["detuning"] = fmt_num(detuning);
        p["interleave"] = interleave;
        if (shot_count > 0) o.measurement = MeasurementModel{ReadoutModel::ideal(1), false, false, shot_count};
        detail::RunContext run(cfg, device, err);
        GateSetOptions g1 = go;
        g1.error = {rabi_error, detuning};
        const PulseGateSet1 set(device, channel, g1);
        const RBDataset ref = run_rb(set, o);
        const BootstrapResult bref = bootstrap_uncertainty(ref, bootstrap, cfg.seed);
        std::string text = detail::rb_table(ref, ref.fit, bref, kGatesPerClifford1, "reference");
        if (!interleave.empty()) {
          RBOptions oi = o;
          oi.interleave = clifford_find(1, named_gate_target(interleave));
          const RBDataset il = run_rb(set, oi);
          const BootstrapResult bil = bootstrap_uncertainty(il, bootstrap, cfg.seed + 1);
          text += "\n" + detail::rb_table(il, il.fit, bil, 1.0, "interleaved " + interleave);
          const InterleavedFidelity f = interleaved_fidelity(il.fit.p, ref.fit.p, 2, bref.sigma_p + bil.sigma_p);
          text += "F_gate\t" + fmt_num(f.fidelity) + "\n";
          if (f.exceeds_reference) text += "warning\tinterleaved decay slower than reference\n";
        }
        run.write("rb.tsv", text);
        out << "F_avg per gate " << fmt_num(reference_fidelity(ref.fit.p, 2, kGatesPerClifford1)) << "\n";
        return finish(run);
      }

      const CzCalibration cal = calibrate_cz(device, kPi, dt);
      const QuantumChannel cz = gate_channel(cal.schedule(dt), device, {}, decoh, EvolveOptions{Model::pair_coupled});

      EvolveOptions pair{Model::pair_effective};
      pair.zz_coupling = zz == "on";
      p["zz"] = zz;

      if (cfg.experiment == "rb2") {
        p["interleave"] = interleave;
        if (!interleave.empty() && interleave != "CZ") throw std::invalid_argument("--interleave: rb2 interleaves CZ only");
        if (shot_count > 0) o.measurement = MeasurementModel{ReadoutModel::ideal(2), false, false, shot_count};
        detail::RunContext run(cfg, device, err);
        const PulseGateSet2 set(device, cz, go, pair);
        const RBDataset ref = run_rb(set, o);
        const BootstrapResult bref = bootstrap_uncertainty(ref, bootstrap, cfg.seed);
        std::string text = detail::rb_table(ref, ref.fit, bref, 1.0, "reference");
        if (!interleave.empty()) {
          RBOptions oi = o;
          oi.interleave = CliffordGroup2::instance().find(cz_matrix());
          const RBDataset il = run_rb(set, oi);
          const BootstrapResult bil = bootstrap_uncertainty(il, bootstrap, cfg.seed + 1);
          text += "\n" + detail::rb_table(il, il.fit, bil, 1.0, "interleaved CZ");
          const InterleavedFidelity f = interleaved_fidelity(il.fit.p, ref.fit.p, 4, bref.sigma_p + bil.sigma_p);
          text += "F_CZ\t" + fmt_num(f.fidelity) + "\n";
          if (f.exceeds_reference) text += "warning\tinterleaved decay slower than reference\n";
        }
        run.write("rb2.tsv", text);
        out << "F_clifford " << fmt_num(reference_fidelity(ref.fit.p, 4)) << "\n";
        return finish(run);
      }

      detail::RunContext run(cfg, device, err);
      const PulseGateSet2 set(device, cz, go, pair);
      const SimultaneousRBResult r = simultaneous_rb(set, o);
      std::ostringstream t;
      const std::vector<std::pair<std::string, const RBDataset*>> sets{{"A_alone", &r.a_alone},
                                                                       {"B_alone", &r.b_alone},
                                                                       {"A_simultaneous", &r.a_simultaneous},
                                                                       {"B_simultaneous", &r.b_simultaneous}};
      t << "run\tm\tmean_F\tstd_F\n";
      for (const auto& [name, d] : sets) {
        const auto mu = d->means();
        const auto sd = d->stddevs();
        for (std::size_t i = 0; i < d->m_values.size(); ++i)
          t << name << "\t" << d->m_values[i] << "\t" << fmt_num(mu[i]) << "\t" << fmt_num(sd[i]) << "\n";
      }
      t << "\n# summary\nrun\tp\tsigma_p\tr\n";
      for (const auto& [name, d] : sets)
        t << name << "\t" << fmt_num(d->fit.p) << "\t" << fmt_num(d->fit.sigma_p) << "\t"
          << fmt_num(error_per_clifford(d->fit.p, 2)) << "\n";
      run.write("simul_rb.tsv", t.str());
      out << "r_A " << fmt_num(r.r_a()) << " r_A|B " << fmt_num(r.r_a_given_b()) << " r_B " << fmt_num(r.r_b())
          << " r_B|A " << fmt_num(r.r_b_given_a()) << "\n";
      return finish(run);
    }

    if (cfg.experiment == "sweep") {
      SweepOptions o;
      o.axis = sweep_axis_from_name(axis);
      o.gates = split_names(gates);
      o.kinds.clear();
      for (const auto& k : split_names(kinds)) o.kinds.push_back(sweep_kind_from_name(k));
      if (o.gates.empty() || o.kinds.empty()) throw std::invalid_argument("sweep: need at least one gate and one kind");
      if (!grid.empty()) o.grid = parse_grid(grid, "--grid");
      o.decoherence = decoh;
      o.channel = channel;
      o.dt = dt;
      p["axis"] = sweep_axis_name(o.axis);
      p["gates"] = gates;
      p["kinds"] = kinds;
      p["grid"] = grid.empty() ? "default" : grid;
      p["qubit"] = qubit;
      detail::RunContext run(cfg, device, err);
      const SweepResult r = noise_sweep(device, o);
      const std::string col = o.axis == SweepAxis::rabi ? "rabi_error" : "detuning_mhz";
      std::ostringstream summary;
      summary << "gate\tkind\tF_at_zero\tF_min\tF_max\targmax\n";
      for (const auto& c : r.curves) {
        std::ostringstream t;
        t << col << "\tprocess_fidelity\n";
        for (std::size_t j = 0; j < r.error_grid.size(); ++j)
          t << fmt_num(r.error_grid[j]) << "\t" << fmt_num(c.fidelity[j]) << "\n";
        run.write("sweep_" + sweep_axis_name(o.axis) + "_" + gate_file_tag(c.gate) + "_" + sweep_kind_name(c.kind) +
                      ".tsv",
                  t.str());
        const auto [lo, hi] = std::minmax_element(c.fidelity.begin(), c.fidelity.end());
        std::string zero = "nan";
        for (std::size_t j = 0; j < r.error_grid.size(); ++j)
          if (std::abs(r.error_grid[j]) < 1e-12) zero = fmt_num(c.fidelity[j]);
        summary << c.gate << "\t" << sweep_kind_name(c.kind) << "\t" << zero << "\t" << fmt_num(*lo) << "\t"
                << fmt_num(*hi) << "\t" << fmt_num(r.error_grid[static_cast<std::size_t>(hi - c.fidelity.begin())])
                << "\n";
      }
      run.write("sweep_" + sweep_axis_name(o.axis) + "_summary.tsv", summary.str());
      out << r.curves.size() << " curves over " << r.error_grid.size() << " points\n";
      return finish(run);
    }

    if (cfg.experiment == "chevron") {
      p["amp"] = fmt_num(amp);
      p["nu"] = nu_grid;
      p["t"] = t_grid;
      detail::RunContext run(cfg, device, err);
      ChevronResult c = chevron_simulate(device.without_decoherence(), amp, parse_grid(nu_grid, "--nu"),
                                         parse_grid(t_grid, "--t"), dt);
      std::ostringstream t;
      t << "nu_mhz\tt_ns\tp11\n";
      for (std::size_t i = 0; i < c.nu_grid.size(); ++i)
        for (std::size_t j = 0; j < c.t_grid.size(); ++j)
          t << fmt_num(c.nu_grid[i]) << "\t" << fmt_num(c.t_grid[j]) << "\t" << fmt_num(c.p11[i][j]) << "\n";
      std::string fit_error;
      try {
        fit_chevron(c);
      } catch (const std::runtime_error& e) {
        fit_error = e.what();
      }
      t << "\n# summary\n";
      if (fit_error.empty()) {
        t << "nu_res_mhz\t" << fmt_num(c.nu_res) << "\ng_eff_mhz\t" << fmt_num(c.g_eff) << "\nresidual_rms\t"
          << fmt_num(c.residual_rms) << "\n";
      } else {
        t << "fit\tfailed\n";
      }
      run.write("chevron.tsv", t.str());
      run.write_manifest();
      if (!fit_error.empty()) {
        err << "geoqc: " << fit_error << "\n";
        return 3;
      }
      out << "nu_res " << fmt_num(c.nu_res) << " MHz, g_eff " << fmt_num(c.g_eff) << " MHz\n";
      return 0;
    }

    if (cfg.experiment == "cz-phase") {
      p["mode"] = mode;
      p["amp"] = fmt_num(amp);
      p["dphi"] = dphi_grid;
      p["counts"] = counts;
      detail::RunContext run(cfg, device, err);
      const DeviceModel ideal = device.without_decoherence();
      const CzCalibration cal = calibrate_cz(ideal, initial_cz_guess(ideal, amp), kPi, dt);
      const ComplexMatrix u = gate_unitary(cal.schedule(dt), ideal, {}, EvolveOptions{Model::pair_coupled});
      const CzPhases ph = extract_cz_phases(u);
      std::ostringstream c;
      c << "nu_mhz\t" << fmt_num(cal.modulation.freq_mhz) << "\n";
      c << "amp_mhz\t" << fmt_num(cal.modulation.amp_mhz) << "\n";
      c << "g_eff_mhz\t" << fmt_num(cal.g_eff_mhz) << "\n";
      c << "duration_ns\t" << fmt_num(cal.schedule(dt).total_duration()) << "\n";
      c << "delta_phi\t" << fmt_num(cal.delta_phi) << "\n";
      c << "virtual_z_a\t" << fmt_num(cal.virtual_z[0]) << "\n";
      c << "virtual_z_b\t" << fmt_num(cal.virtual_z[1]) << "\n";
      c << "gamma\t" << fmt_num(ph.gamma) << "\n";
      c << "process_fidelity_ideal\t" << fmt_num(trace_fidelity(cz_target_unitary(kPi), u)) << "\n";
      run.write("cz_phase_calibration.tsv", c.str());
      if (mode == "all" || mode == "dphi") {
        const DphiScan s = phase_vs_dphi_scan(ideal, cal, parse_grid(dphi_grid, "--dphi"), dt);
        std::ostringstream t;
        t << "dphi\tphi01\tphi10\tphi11\tgamma\n";
        for (std::size_t i = 0; i < s.dphi.size(); ++i)
          t << fmt_num(s.dphi[i]) << "\t" << fmt_num(s.phases[i].phi01) << "\t" << fmt_num(s.phases[i].phi10) << "\t"
            << fmt_num(s.phases[i].phi11) << "\t" << fmt_num(s.phases[i].gamma) << "\n";
        t << "\n# summary\nslope\t" << fmt_num(s.gamma_fit.slope) << "\nintercept\t" << fmt_num(s.gamma_fit.intercept)
          << "\ndrift01\t" << fmt_num(s.drift01) << "\ndrift10\t" << fmt_num(s.drift10) << "\n";
        run.write("cz_phase_dphi.tsv", t.str());
      }
      if (mode == "all" || mode == "count") {
        std::vector<int> n;
        for (auto v : parse_counts(counts, "--counts", 0)) n.push_back(static_cast<int>(v));
        const GateCountScan s = phase_vs_gatecount_scan(ideal, cal, n, dt);
        std::ostringstream t;
        t << "n\tphi01\tphi10\tphi11\tgamma\tphi11_unwrapped\tgamma_unwrapped\n";
        for (std::size_t i = 0; i < s.counts.size(); ++i)
          t << s.counts[i] << "\t" << fmt_num(s.phases[i].phi01) << "\t" << fmt_num(s.phases[i].phi10) << "\t"
            << fmt_num(s.phases[i].phi11) << "\t" << fmt_num(s.phases[i].gamma) << "\t"
            << fmt_num(s.phi11_unwrapped[i]) << "\t" << fmt_num(s.gamma_unwrapped[i]) << "\n";
        t << "\n# summary\ngamma_slope\t" << fmt_num(s.gamma_fit.slope) << "\nphi11_slope\t"
          << fmt_num(s.phi11_fit.slope) << "\n";
        run.write("cz_phase_count.tsv", t.str());
      }
      out << "gamma " << fmt_num(ph.gamma) << " at dphi " << fmt_num(cal.delta_phi) << "\n";
      return finish(run);
    }

    if (cfg.experiment == "compile") {
      CompileRequest r;
      r.dt = dt;
      r.channel = channel;
      const SweepKind k = sweep_kind_from_name(kind);
      r.kind = k == SweepKind::dynamical ? GateKind::dynamical : GateKind::geometric;
      r.config = k == SweepKind::geometric_b ? GateConfig::B : GateConfig::A;
      std::string name = gate;
      if (theta || gamma || phi) {
        GateSpec g;
        g.theta = theta.value_or(kPi / 2);
        g.gamma = gamma.value_or(0.0);
        g.varphi = phi.value_or(0.0);
        r.spec = g;
        name = "theta" + fmt_num(g.theta) + "_gamma" + fmt_num(g.gamma) + "_phi" + fmt_num(g.varphi);
        p["theta"] = fmt_num(g.theta);
        p["gamma"] = fmt_num(g.gamma);
        p["phi"] = fmt_num(g.varphi);
      } else {
        r.gate = gate;
        p["gate"] = gate;
      }
      p["kind"] = kind;
      p["qubit"] = qubit;
      detail::RunContext run(cfg, device, err);
      const CompiledSchedule c = compile_gate(r, device);
      std::string target = file;
      if (target.empty()) {
        const std::string leaf = "schedule_" + gate_file_tag(name) + ".json";
        run.write(leaf, schedule_to_json(c.schedule, c.target).dump(1) + "\n");
        target = run.path(leaf);
      } else {
        write_schedule(target, c);
      }
      const ScheduleVerification v = verify_schedule(c, device);
      out << "wrote " << target << " (" << c.schedule.num_samples() << " samples, fidelity " << fmt_num(v.fidelity)
          << ")\n";
      run.write_manifest();
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "geoqc: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "geoqc: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "geoqc: " << e.what() << "\n";
    return 3;
  }
  err << "geoqc: unknown experiment '" << cfg.experiment << "'\n";
  return 2;
}

}  // namespace geoqc
