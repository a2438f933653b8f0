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

#include "geoqc/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace geoqc {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geoqc_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Runs the built executable; falls back to the in-process entry point when
// the tool location is not provided by the test driver.
int tool(const std::string& args) {
  if (const char* exe = std::getenv("GEOQC_TOOL")) {
    const int status = std::system((std::string("\"") + exe + "\" " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::vector<std::string> words{"geoqc"};
  std::istringstream in(args);
  for (std::string w; in >> w;) words.push_back(w);
  std::vector<const char*> argv;
  for (const auto& w : words) argv.push_back(w.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

struct InProcess {
  int status;
  std::string out, err;
};

InProcess cli(std::vector<std::string> words) {
  words.insert(words.begin(), "geoqc");
  std::vector<const char*> argv;
  for (const auto& w : words) argv.push_back(w.c_str());
  std::ostringstream out, err;
  const int s = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {s, out.str(), err.str()};
}

std::vector<std::vector<std::string>> table(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    if (rows.empty() && !line.empty() && line[0] == '#') continue;
    if (line.empty() || line[0] == '#') break;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    rows.push_back(cols);
  }
  return rows;
}

TEST(Grid, RangesAndLists) {
  EXPECT_EQ(parse_grid("0:1:0.25", "--g"), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(parse_grid("1,5,10", "--g"), (std::vector<double>{1, 5, 10}));
  EXPECT_THROW(parse_grid("1:0:1", "--g"), std::invalid_argument);
  EXPECT_THROW(parse_grid("0:1:0", "--g"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1,x", "--g"), std::invalid_argument);
  EXPECT_THROW(parse_counts("1,2.5", "--m", 1), std::invalid_argument);
  EXPECT_EQ(gate_file_tag("X/2"), "X2");
  EXPECT_EQ(gate_file_tag("-Y/2"), "mY2");
}

TEST(Run, QptOfXHasUnitXXWeight) {
  const fs::path dir = scratch("qpt");
  ASSERT_EQ(tool("run qpt --gate X --decoherence off --out " + dir.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "qpt_X.json"));
  const auto labels = j.at("labels").get<std::vector<std::string>>();
  const auto x = static_cast<std::size_t>(std::find(labels.begin(), labels.end(), "X") - labels.begin());
  ASSERT_LT(x, labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r)
    for (std::size_t c = 0; c < labels.size(); ++c) {
      EXPECT_NEAR(j["re"][r][c].get<double>(), r == x && c == x ? 1.0 : 0.0, 1e-8);
      EXPECT_NEAR(j["im"][r][c].get<double>(), 0.0, 1e-8);
    }
  EXPECT_TRUE(fs::exists(dir / "qpt_X.tsv"));
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m.at("experiment"), "qpt");
  EXPECT_EQ(m.at("seed"), 0);
  EXPECT_EQ(m.at("version"), GEOQC_VERSION);
  EXPECT_EQ(m.at("config_hash").get<std::string>().size(), 16u);
}

TEST(Run, RbIsByteIdenticalForEqualSeeds) {
  const fs::path a = scratch("rb_a"), b = scratch("rb_b"), c = scratch("rb_c");
  const std::string args = "run rb --m 1,5,10,20,40 --k 50 --seed 7 --out ";
  ASSERT_EQ(tool(args + a.string()), 0);
  ASSERT_EQ(tool(args + b.string()), 0);
  ASSERT_EQ(tool("run rb --m 1,5,10,20,40 --k 50 --seed 8 --out " + c.string()), 0);
  EXPECT_EQ(slurp(a / "rb.tsv"), slurp(b / "rb.tsv"));
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  EXPECT_NE(slurp(a / "rb.tsv"), slurp(c / "rb.tsv"));
  const auto rows = table(a / "rb.tsv");
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0][0], "m");
  EXPECT_EQ(rows[1].size(), 53u);
  const std::string text = slurp(a / "rb.tsv");
  EXPECT_NE(text.find("\nF_avg_per_gate\t"), std::string::npos);
  EXPECT_NE(text.find("\nsigma_p_bootstrap\t"), std::string::npos);
}

TEST(Run, SweepWritesNineCurvesMatchingTheSweepModule) {
  const fs::path dir = scratch("sweep");
  ASSERT_EQ(tool("run sweep --axis rabi --gates X/2,H,T --decoherence off --out " + dir.string()), 0);
  const DeviceModel device = load_device_config(GEOQC_DEFAULT_DEVICE).without_decoherence();
  for (const std::string g : {"X/2", "H", "T"})
    for (const SweepKind k : {SweepKind::geometric_a, SweepKind::geometric_b, SweepKind::dynamical}) {
      const fs::path f = dir / ("sweep_rabi_" + gate_file_tag(g) + "_" + sweep_kind_name(k) + ".tsv");
      ASSERT_TRUE(fs::exists(f)) << f;
      const auto rows = table(f);
      ASSERT_EQ(rows.size(), 22u);
      EXPECT_EQ(rows[0][0], "rabi_error");
      EXPECT_DOUBLE_EQ(std::stod(rows[1][0]), -0.2);
      const double expected = gate_process_fidelity(device, g, k, ErrorInjection{-0.2, 0.0}, false, Channel::xy_b);
      EXPECT_NEAR(std::stod(rows[1][1]), expected, 1e-10);
    }
  EXPECT_TRUE(fs::exists(dir / "sweep_rabi_summary.tsv"));
}

TEST(Compile, GeometricXHasThreeSegments) {
  const fs::path dir = scratch("compile_x");
  ASSERT_EQ(tool("compile --gate X --kind geo-A --out " + dir.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "schedule_X.json"));
  const auto& segs = j.at("channels").begin().value();
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_NEAR(segs[0].at("area").get<double>(), kPi / 2, 1e-9);
  EXPECT_NEAR(segs[1].at("area").get<double>(), kPi, 1e-9);
  EXPECT_NEAR(segs[2].at("area").get<double>(), kPi / 2, 1e-9);
  EXPECT_EQ(j.at("samples").begin().value().size(), j.at("num_samples").get<std::size_t>());
  EXPECT_EQ(tool("verify --file " + (dir / "schedule_X.json").string()), 0);
}

TEST(Compile, RoundTripReproducesTarget) {
  const DeviceModel device = DeviceModel::reference();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    CompileRequest r;
    r.spec = GateSpec{kPi * u(rng), 2 * kPi * (u(rng) - 0.5), 2 * kPi * u(rng)};
    r.config = trial % 2 ? GateConfig::B : GateConfig::A;
    if (r.config == GateConfig::B) r.spec->theta = kPi / 2;
    const CompiledSchedule c = compile_gate(r, device);
    const CompiledSchedule back = schedule_from_json(nlohmann::json::parse(schedule_to_json(c.schedule, c.target).dump()));
    EXPECT_EQ(back.schedule.num_samples(), c.schedule.num_samples());
    EXPECT_LT((back.target - c.target).norm(), 1e-12);
    const ComplexMatrix want = target_unitary(*r.spec);
    EXPECT_GT(trace_fidelity(want, back.target), 1.0 - 1e-12);
    EXPECT_GT(verify_schedule(back, device).fidelity, 1.0 - 1e-6);
  }
}

TEST(Compile, CzRoundTrip) {
  const fs::path dir = scratch("compile_cz");
  ASSERT_EQ(tool("compile --gate CZ --out " + dir.string()), 0);
  const CompiledSchedule c = read_schedule((dir / "schedule_CZ.json").string());
  EXPECT_TRUE(c.schedule.drives(Channel::z_a));
  EXPECT_EQ(c.target.rows(), 4);
  const ScheduleVerification v = verify_schedule(c, DeviceModel::reference());
  EXPECT_GT(v.fidelity, 0.995);
  EXPECT_FALSE(v.target_is_identity);
}

TEST(Compile, ZeroGammaIsReportedAsIdentity) {
  const fs::path dir = scratch("compile_id");
  const InProcess r = cli({"compile", "--theta", "1.2", "--gamma", "0", "--phi", "0.7", "--file", (dir / "id.json").string(), "--out", dir.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const InProcess v = cli({"verify", "--file", (dir / "id.json").string()});
  EXPECT_EQ(v.status, 0);
  EXPECT_NE(v.out.find("schedule implements the identity"), std::string::npos);
}

TEST(ScheduleFile, RejectsInconsistentDocuments) {
  const CompiledSchedule c = compile_gate(CompileRequest{"X/2"}, DeviceModel::reference());
  nlohmann::json j = schedule_to_json(c.schedule, c.target);
  auto bad = j;
  bad["format"] = "other";
  EXPECT_THROW(schedule_from_json(bad), std::invalid_argument);
  bad = j;
  bad["target"] = detail::matrix_to_json(ComplexMatrix::Identity(4, 4));
  EXPECT_THROW(schedule_from_json(bad), std::invalid_argument);
  bad = j;
  bad["dt"] = -1.0;
  EXPECT_THROW(schedule_from_json(bad), std::invalid_argument);
  EXPECT_THROW(compile_gate(CompileRequest{"Q"}, DeviceModel::reference()), std::invalid_argument);
}

TEST(ScheduleFile, VerifyFailsOnAMismatchedTarget) {
  const fs::path dir = scratch("mismatch");
  CompiledSchedule c = compile_gate(CompileRequest{"X"}, DeviceModel::reference());
  c.target = named_gate_target("Y/2");
  write_schedule((dir / "s.json").string(), c);
  const InProcess v = cli({"verify", "--file", (dir / "s.json").string()});
  EXPECT_EQ(v.status, 1);
  EXPECT_NE(v.err.find("does not reproduce its target"), std::string::npos);
}

TEST(Chevron, FailedFitStillWritesTheTable) {
  const fs::path dir = scratch("chevron");
  const InProcess r = cli({"chevron", "--nu", "200:210:5", "--t", "0:40:10", "--out", dir.string()});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("no resonance"), std::string::npos);
  EXPECT_EQ(table(dir / "chevron.tsv").size(), 1u + 3 * 5);
}

TEST(Errors, EveryFailureExitsNonzeroWithAMessage) {
  const fs::path dir = scratch("errors");
  const fs::path cfg = dir / "bad.cfg";
  {
    std::ofstream f(cfg);
    f << slurp(GEOQC_DEFAULT_DEVICE) << "qubit_a.t1_us = 3\n";
  }
  const std::string out = (dir / "o").string();
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
      {{"teleport"}, "teleport"},
      {{}, "subcommand"},
      {{"qpt", "--device", cfg.string(), "--out", out}, "duplicate key 'qubit_a.t1_us'"},
      {{"qpt", "--device", (dir / "missing.cfg").string(), "--out", out}, "missing.cfg"},
      {{"qpt", "--gate", "Q", "--out", out}, "unknown gate"},
      {{"qpt", "--decoherence", "maybe"}, "decoherence"},
      {{"qpt", "--shots", "lots"}, "--shots"},
      {{"qpt", "--dt", "-1"}, "dt"},
      {{"rb", "--k", "0", "--out", out}, "--k"},
      {{"rb", "--m", "1:0:1", "--out", out}, "--m"},
      {{"rb", "--bootstrap", "10", "--out", out}, "--bootstrap"},
      {{"rb2", "--interleave", "X", "--out", out}, "CZ only"},
      {{"sweep", "--axis", "flux", "--out", out}, "flux"},
      {{"sweep", "--kinds", "geo-C", "--out", out}, "geo-C"},
      {{"compile", "--gate", "Q", "--out", out}, "unknown gate"},
      {{"compile", "--kind", "dyn", "--theta", "0.3", "--gamma", "1", "--out", out}, "theta = pi/2"},
      {{"verify", "--file", (dir / "nothing.json").string()}, "nothing.json"},
      {{"verify"}, "--file"},
  };
  for (const auto& [args, needle] : cases) {
    const InProcess r = cli(args);
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    EXPECT_NE(r.status, 0) << joined;
    EXPECT_NE(r.err.find(needle), std::string::npos) << joined << "\n" << r.err;
  }
}

TEST(Manifest, HashTracksParametersAndSeed) {
  const fs::path a = scratch("hash_a"), b = scratch("hash_b"), c = scratch("hash_c");
  ASSERT_EQ(cli({"qpt", "--gate", "Y/2", "--out", a.string()}).status, 0);
  ASSERT_EQ(cli({"run", "qpt", "--gate", "Y/2", "--out", b.string(), "--seed", "3"}).status, 0);
  ASSERT_EQ(cli({"qpt", "--gate", "X/2", "--out", c.string()}).status, 0);
  const auto h = [](const fs::path& d) { return nlohmann::json::parse(slurp(d / "manifest.json")).at("config_hash"); };
  EXPECT_NE(h(a), h(b));
  EXPECT_NE(h(a), h(c));
  EXPECT_EQ(slurp(a / "qpt_Y2.tsv"), slurp(b / "qpt_Y2.tsv"));
}

}  // namespace
}  // namespace geoqc
