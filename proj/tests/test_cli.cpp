// Copyright 2026 The sdploc Authors
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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_path = fs::temp_directory_path() / ("sdploc_cli_out_" +
                                                         std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string(SDPLOC_CLI_PATH) + " " + args + " > " + out_path.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  fs::remove(out_path);
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "sdploc_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string trilateration_instance() {
  const fs::path path = temp_dir() / "tri.json";
  std::ofstream out(path);
  out << R"({"version":1,"n":1,"m":3,"radio_range":2.0,"noise_std":0.0,)"
      << R"("noise_model":"additive","anchors":[[0.0,0.0],[1.0,0.0],[0.0,1.0]],)"
      << R"("sensors":[[0.3,0.4]],"sensor_edges":[],)"
      << R"("anchor_edges":[[0,0,0.5],[0,1,0.8062257748298549],[0,2,0.6708203932499369]]})";
  return path.string();
}

double parse_field(const std::string& output, const std::string& key) {
  const auto pos = output.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(output.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("gen writes an instance and prints the edge count") {
  const fs::path out = temp_dir() / "gen_a.json";
  RunResult r = run_cli("gen --sensors 20 --anchors 4 --radio-range 0.4 --noise-std 0.05 "
                        "--seed 7 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("v=", 0) == 0);
  CHECK(std::stoi(r.output.substr(2)) > 0);
  CHECK(fs::exists(out));
}

TEST_CASE("gen is deterministic at the byte level") {
  const fs::path a = temp_dir() / "det_a.json";
  const fs::path b = temp_dir() / "det_b.json";
  const std::string flags = "gen --sensors 15 --anchors 3 --radio-range 0.4 --noise-std 0.05 "
                            "--seed 99 --out ";
  REQUIRE(run_cli(flags + a.string()).exit_code == 0);
  REQUIRE(run_cli(flags + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("gen rejects zero sensors with exit 2") {
  const fs::path out = temp_dir() / "gen_zero.json";
  CHECK(run_cli("gen --sensors 0 --out " + out.string()).exit_code == 2);
}

TEST_CASE("gen reports an empty graph with exit 3") {
  const fs::path out = temp_dir() / "gen_empty.json";
  CHECK(run_cli("gen --sensors 3 --anchors 0 --radio-range 0.0001 --seed 1 --out " +
                out.string()).exit_code == 3);
}

TEST_CASE("unknown flags are rejected with exit 2") {
  CHECK(run_cli("gen --sensors 5 --funky 7 --out /tmp/x.json").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("help exits zero and lists flags with their defaults") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("solve --help").exit_code == 0);
  RunResult ev = run_cli("eval --help");
  CHECK(ev.exit_code == 0);
  CHECK(ev.output.find("0.0049") != std::string::npos);
  CHECK(ev.output.find("0.008") != std::string::npos);
  CHECK(ev.output.find("0.022") != std::string::npos);
  RunResult gn = run_cli("gen --help");
  CHECK(gn.output.find("--radio-range") != std::string::npos);
  CHECK(gn.output.find("[0.25]") != std::string::npos);
}

TEST_CASE("solve recovers the trilateration instance and writes CSVs") {
  const std::string inst = trilateration_instance();
  const fs::path pos = temp_dir() / "pos.csv";
  const fs::path err = temp_dir() / "err.csv";
  for (const std::string objective : {"biswas-ye", "ls", "qp"}) {
    RunResult r = run_cli("solve --in " + inst + " --objective " + objective +
                          " --out-positions " + pos.string() + " --out-errors " + err.string());
    CAPTURE(objective);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("status=Optimal") != std::string::npos);
    CHECK(parse_field(r.output, "pe") < 1e-3);
    CHECK(parse_field(r.output, "gap") <= 1e-7);
    const std::string positions = slurp(pos);
    CHECK(positions.rfind("index,x,y", 0) == 0);
    const std::string errors = slurp(err);
    CHECK(errors.rfind("edge_kind,i,j_or_k,error", 0) == 0);
    CHECK(errors.find("anchor,0,0,") != std::string::npos);
  }
}

TEST_CASE("solve qp-gamma needs a positive gamma") {
  const std::string inst = trilateration_instance();
  CHECK(run_cli("solve --in " + inst + " --objective qp-gamma").exit_code == 2);
  RunResult ok = run_cli("solve --in " + inst + " --objective qp-gamma --gamma 1000");
  CHECK(ok.exit_code == 0);
  CHECK(parse_field(ok.output, "pe") < 1e-3);
}

TEST_CASE("eval of a perfect estimate reports zero PE and tail") {
  const std::string inst = trilateration_instance();
  const fs::path est = temp_dir() / "est.csv";
  {
    std::ofstream out(est);
    out << "index,x,y\n0,0.3,0.4\n";
  }
  const fs::path hist = temp_dir() / "hist.csv";
  RunResult r = run_cli("eval --truth " + inst + " --estimate " + est.string() +
                        " --out-histogram " + hist.string());
  CHECK(r.exit_code == 0);
  CHECK(parse_field(r.output, "pe") < 1e-12);
  CHECK(parse_field(r.output, "tail_fraction") == 0.0);
  CHECK(slurp(hist).rfind("bin_lo,bin_hi,count,p,q", 0) == 0);
}

TEST_CASE("eval rejects mismatched estimate lengths") {
  const std::string inst = trilateration_instance();
  const fs::path est = temp_dir() / "est_bad.csv";
  {
    std::ofstream out(est);
    out << "index,x,y\n0,0.3,0.4\n1,0.1,0.1\n";
  }
  CHECK(run_cli("eval --truth " + inst + " --estimate " + est.string()).exit_code == 2);
}

TEST_CASE("sweep requires a readable config") {
  CHECK(run_cli("sweep --kind noise --config /no/such.json --out-dir /tmp").exit_code == 2);
}

TEST_CASE("a tiny sweep writes aggregate and per-network CSVs") {
  const fs::path cfg = temp_dir() / "sweep_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"num_networks": 2, "master_seed": 5,
               "base": {"n": 8, "m": 3, "radio_range": 0.6, "noise_std": 0.05},
               "objectives": ["ls"],
               "sweep": {"kind": "noise", "values": [0.05]}})";
  }
  const fs::path out_dir = temp_dir() / "sweep_out";
  RunResult r = run_cli("sweep --config " + cfg.string() + " --out-dir " + out_dir.string());
  CHECK(r.exit_code == 0);
  const std::string agg = slurp(out_dir / "noise_aggregate.csv");
  CHECK(agg.rfind("sweep_value,objective,", 0) == 0);
  CHECK(agg.find("\n0.05,ls,") != std::string::npos);
  CHECK(fs::exists(out_dir / "noise_networks.csv"));
}

TEST_CASE("a sweep where every network fails exits 6") {
  const fs::path cfg = temp_dir() / "sweep_allfail.json";
  {
    std::ofstream out(cfg);
    out << R"({"num_networks": 2, "master_seed": 5,
               "base": {"n": 8, "m": 3, "radio_range": 0.0001, "noise_std": 0.05},
               "objectives": ["ls"],
               "sweep": {"kind": "noise", "values": [0.05]}})";
  }
  const fs::path out_dir = temp_dir() / "sweep_allfail_out";
  CHECK(run_cli("sweep --config " + cfg.string() + " --out-dir " + out_dir.string()).exit_code ==
        6);
}

TEST_CASE("dump-fig9 writes the scatter CSV") {
  const fs::path out = temp_dir() / "fig9.csv";
  RunResult r = run_cli("dump-fig9 --seed 4 --out " + out.string());
  CHECK(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("objective,index,true_x,true_y,est_x,est_y", 0) == 0);
  CHECK(text.find("anchor,") != std::string::npos);
  CHECK(text.find("biswas-ye,") != std::string::npos);
  CHECK(text.find("qp,") != std::string::npos);
}
