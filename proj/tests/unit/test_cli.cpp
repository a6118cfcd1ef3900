#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(PVQA_SCRATCH_DIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const std::string& args) {
  const fs::path err_file = fs::path(PVQA_SCRATCH_DIR) / "stderr.txt";
  fs::create_directories(PVQA_SCRATCH_DIR);
  const std::string cmd = std::string("\"") + PVQA_CLI_PATH + "\" " + args + " 2>\"" + err_file.string() + "\"";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
    o.out.append(buf, n);
  }
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.err = slurp(err_file);
  return o;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    out.push_back(l);
  }
  return out;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("gen gpp writes a graph and reports its size") {
  const auto dir = scratch("gen_gpp");
  const auto o = cli("--seed 3 gen gpp --nodes 8 --density 0.5 --out " + q(dir / "g.json"));
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "g.json"));
  CHECK(j.at("kind") == "gpp");
  CHECK(j.at("n_nodes") == 8);
  const auto edges = j.at("edges").size();
  CHECK(o.out.find("n=8 edges=" + std::to_string(edges)) != std::string::npos);
}

TEST_CASE("gen gpp with --count writes one file per seed") {
  const auto dir = scratch("gen_count");
  REQUIRE(cli("--seed 5 gen gpp --nodes 6 --count 3 --out " + q(dir)).code == 0);
  CHECK(fs::exists(dir / "gpp_n6_s5.json"));
  CHECK(fs::exists(dir / "gpp_n6_s6.json"));
  CHECK(fs::exists(dir / "gpp_n6_s7.json"));
}

TEST_CASE("odd node count is a usage error") {
  const auto o = cli("gen gpp --nodes 7");
  CHECK(o.code == 1);
  CHECK(o.err.find("nodes must be even") != std::string::npos);
}

TEST_CASE("gen qkp from the fixture base scales the capacity") {
  const auto dir = scratch("gen_qkp");
  const fs::path base = fs::path(PVQA_FIXTURE_DIR) / "base100.txt";
  // The capacity sits on the line just before the weights row, which ends the file.
  std::vector<std::string> base_lines;
  for (const auto& l : lines(slurp(base))) {
    if (l.find_first_not_of(" \t\r") != std::string::npos) {
      base_lines.push_back(l);
    }
  }
  REQUIRE(base_lines.size() >= 2);
  const std::size_t base_capacity = std::stoul(base_lines[base_lines.size() - 2]);
  REQUIRE(base_capacity > 0);
  const auto o = cli("gen qkp --items 8 --base " + q(base) + " --out " + q(dir / "q.json"));
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "q.json"));
  CHECK(j.at("capacity").get<std::size_t>() == 8 * base_capacity / 100);
  CHECK(o.out.find("capacity=" + std::to_string(8 * base_capacity / 100)) != std::string::npos);
}

TEST_CASE("run is deterministic and replays from its config") {
  const auto dir = scratch("run");
  REQUIRE(cli("--seed 2 gen gpp --nodes 6 --out " + q(dir / "g.json")).code == 0);
  const std::string common = "run --instance " + q(dir / "g.json") + " --variant pVQA -T 1 --A 1 ";
  REQUIRE(cli("--out " + q(dir / "a") + " --trace " + common).code == 0);
  REQUIRE(cli("--out " + q(dir / "b") + " --trace " + common).code == 0);

  auto strip = [](nlohmann::json j) {
    j.erase("wall_time_s");
    return j;
  };
  const auto ja = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  const auto jb = nlohmann::json::parse(slurp(dir / "b" / "report.json"));
  CHECK(strip(ja).dump() == strip(jb).dump());
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  CHECK(slurp(dir / "a" / "distribution.csv") == slurp(dir / "b" / "distribution.csv"));
  CHECK(first_line(slurp(dir / "a" / "trace.csv")) == "iteration,p0,p1,value");
  CHECK(first_line(slurp(dir / "a" / "distribution.csv")) == "config,probability");
  CHECK(ja.at("A") == 1.0);
  CHECK(ja.at("p_fs") == 1.0);

  // Replaying the written config into a fresh directory.
  auto cfg = nlohmann::json::parse(slurp(dir / "a" / "config.json"));
  cfg["out"] = (dir / "c").string();
  std::ofstream(dir / "replay.json") << cfg.dump();
  REQUIRE(cli("--config " + q(dir / "replay.json") + " run").code == 0);
  const auto jc = nlohmann::json::parse(slurp(dir / "c" / "report.json"));
  CHECK(strip(ja).dump() == strip(jc).dump());
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("override");
  REQUIRE(cli("gen gpp --nodes 6 --out " + q(dir / "g.json")).code == 0);
  nlohmann::json cfg{{"instance", (dir / "g.json").string()}, {"variant", "QA"}, {"T", 1.0}, {"penalty", 1.0}};
  std::ofstream(dir / "cfg.json") << cfg.dump();
  REQUIRE(cli("--config " + q(dir / "cfg.json") + " --out " + q(dir / "o") + " run --variant pQA").code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
  CHECK(j.at("variant") == "pQA");
  CHECK(j.at("T") == 1.0);
}

TEST_CASE("usage errors exit with code 1") {
  const auto dir = scratch("usage");
  CHECK(cli("").code == 1);
  CHECK(cli("run --no-such-flag").code == 1);
  CHECK(cli("run").code == 1);
  nlohmann::json cfg{{"variant", "QA"}, {"colour", "blue"}};
  std::ofstream(dir / "bad.json") << cfg.dump();
  const auto o = cli("--config " + q(dir / "bad.json") + " run");
  CHECK(o.code == 1);
  CHECK(o.err.find("unknown config key") != std::string::npos);
  REQUIRE(cli("gen gpp --nodes 4 --out " + q(dir / "g.json")).code == 0);
  CHECK(cli("run --instance " + q(dir / "g.json") + " --A-grid 1:2").code == 1);
  CHECK(cli("run --instance " + q(dir / "g.json") + " --variant XYZ").code == 1);
  CHECK(cli("run --instance " + q(dir / "g.json") + " --A 1 --top-k 3").code == 1);
}

TEST_CASE("runtime errors exit with code 2") {
  const auto dir = scratch("runtime");
  CHECK(cli("run --instance " + q(dir / "missing.json")).code == 2);
  fs::create_directories(dir / "empty");
  const auto o = cli("sweep --instances " + q(dir / "empty") + " --out " + q(dir / "o"));
  CHECK(o.code == 2);
  CHECK(o.err.find("no instance files") != std::string::npos);
}

TEST_CASE("sweep writes one row per variant, horizon and size in order") {
  const auto dir = scratch("sweep");
  REQUIRE(cli("--seed 11 gen gpp --nodes 6 --count 2 --out " + q(dir / "inst")).code == 0);
  const auto o = cli("--out " + q(dir / "o") + " sweep --instances " + q(dir / "inst") +
                     " --variants pQA,QA --T-list 0.5,1,2 --A 1");
  REQUIRE(o.code == 0);
  const auto summary = lines(slurp(dir / "o" / "summary.csv"));
  REQUIRE(summary.size() == 1 + 2 * 3);
  CHECK(summary[0] == first_line(slurp(fs::path(PVQA_GOLDEN_DIR) / "summary_header.csv")));
  const std::vector<std::string> expected_prefix{"pQA,0.5,", "pQA,1,", "pQA,2,", "QA,0.5,", "QA,1,", "QA,2,"};
  for (std::size_t i = 0; i < expected_prefix.size(); ++i) {
    CHECK(summary[i + 1].rfind(expected_prefix[i], 0) == 0);
  }
  const auto reports = lines(slurp(dir / "o" / "reports.csv"));
  REQUIRE(reports.size() == 1 + 2 * 3 * 2);
  CHECK(reports[0] == first_line(slurp(fs::path(PVQA_GOLDEN_DIR) / "reports_header.csv")));
  CHECK(lines(slurp(dir / "o" / "reports.jsonl")).size() == 12);
  CHECK(fs::exists(dir / "o" / "config.json"));
}

TEST_CASE("sweep results do not depend on the worker count") {
  const auto dir = scratch("jobs");
  REQUIRE(cli("--seed 21 gen gpp --nodes 6 --count 3 --out " + q(dir / "inst")).code == 0);
  const std::string args = " sweep --instances " + q(dir / "inst") + " --variants pQA,QA --T-list 1 --A 1";
  REQUIRE(cli("--jobs 1 --out " + q(dir / "j1") + args).code == 0);
  REQUIRE(cli("--jobs 3 --out " + q(dir / "j3") + args).code == 0);
  CHECK(slurp(dir / "j1" / "summary.csv") == slurp(dir / "j3" / "summary.csv"));
}

TEST_CASE("tune writes the candidate table and picks an admissible value") {
  const auto dir = scratch("tune");
  // Complete graphs are avoided: at A = 1 their cost is constant on every configuration.
  REQUIRE(cli("gen gpp --nodes 6 --out " + q(dir / "g.json")).code == 0);
  const auto o = cli("--out " + q(dir / "o") + " tune --instance " + q(dir / "g.json") +
                     " --variant pQA -T 1 --A-grid 1:1:4");
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "tune.json"));
  REQUIRE(j.at("candidates").size() == 4);
  bool found = false;
  for (const auto& c : j.at("candidates")) {
    if (c.at("A") == j.at("A")) {
      found = true;
      CHECK(c.at("admissible") == true);
      CHECK(c.at("raw_p_fs").get<double>() >= 0.1);
    }
  }
  CHECK(found);
  CHECK(j.at("report").at("A") == j.at("A"));
}

TEST_CASE("oracle prints the brute-force optima") {
  const auto dir = scratch("oracle");
  REQUIRE(cli("gen gpp --nodes 4 --density 1 --out " + q(dir / "k4.json")).code == 0);
  const auto o = cli("oracle --instance " + q(dir / "k4.json"));
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  // K4 has six balanced cuts, each cutting four edges.
  CHECK(j.at("c_opt") == 4.0);
  CHECK(j.at("optimal_set").size() == 6);
  CHECK(j.at("feasible_count") == 6);
}
