// Runs the colcont binary as a subprocess.
#include <json.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  std::string cmd = std::string(COLCONT_CLI) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("colcont_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

json without_timing(json j) {
  j.erase("seconds");
  return j;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("solve-ex --family nope --host kn --n 4").code, 2);
  EXPECT_EQ(run("solve-ex --family rainbow-k3 --host kn --n 4 --no-such-flag").code, 2);
  EXPECT_EQ(run("solve-ex --family rainbow-k3 --host qn-vertex --n 3").code, 2);
  EXPECT_EQ(run("solve-ex --family rainbow-k3 --host kn").code, 2);
}

TEST(Cli, SolveEx) {
  Outcome r = run("solve-ex --family multigraph-3-4 --host kn --n 5 --threads 2");
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["W_star"], "2304");
  EXPECT_EQ(j["command"], "solve-ex");
}

TEST(Cli, ThreadCountDoesNotChangeTheAnswer) {
  json a = json::parse(run("solve-ex --family no-p2 --host kn --n 6 --threads 1").out);
  json b = json::parse(run("solve-ex --family no-p2 --host kn --n 6 --threads 4").out);
  EXPECT_EQ(a["W_star"], b["W_star"]);
  EXPECT_EQ(a["witnesses"], b["witnesses"]);
}

TEST(Cli, ClosedFormsPass) {
  Outcome r = run("check-closed-forms --case rainbow-k3 --n 3..6");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out)["all_hold"].get<bool>());
}

TEST(Cli, FailedAssertionExitsOne) {
  EXPECT_EQ(run("stability --family rainbow-k3 --n 4 --theta 1/2 --max-distance 0").code, 1);
  EXPECT_EQ(run("stability --family rainbow-k3 --n 4 --theta 1/2").code, 0);
}

TEST(Cli, ManifestReplayReproducesTheReport) {
  fs::path first = scratch("first"), second = scratch("second");
  Outcome r = run("containers --family rainbow-k3 --host kn --n 4 --seed 5 --samples 300 --out " + first.string());
  ASSERT_EQ(r.code, 0);
  ASSERT_TRUE(fs::exists(first / "manifest.json"));
  json m = json::parse(slurp(first / "manifest.json"));
  EXPECT_EQ(m["command"], "containers");
  EXPECT_EQ(m["options"]["seed"], "5");
  EXPECT_TRUE(m["passed"].get<bool>());

  Outcome again = run("replay --manifest " + (first / "manifest.json").string() + " --out " + second.string());
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(first / "report.json"), slurp(second / "report.json"));
  for (const auto& entry : fs::directory_iterator(first)) {
    std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(second / name)) << name;
  }
  fs::remove_all(first);
  fs::remove_all(second);
}

TEST(Cli, ReplayOfATimedCommandMatchesOutsideTheClock) {
  fs::path first = scratch("timed"), second = scratch("timed2");
  ASSERT_EQ(run("solve-ex --family rainbow-k3 --host kn --n 5 --out " + first.string()).code, 0);
  ASSERT_EQ(run("replay --manifest " + (first / "manifest.json").string() + " --out " + second.string()).code, 0);
  EXPECT_EQ(without_timing(json::parse(slurp(first / "report.json"))),
            without_timing(json::parse(slurp(second / "report.json"))));
  fs::remove_all(first);
  fs::remove_all(second);
}

TEST(Cli, ConfigFileFillsFlagsAndTheCommandLineWins) {
  fs::path dir = scratch("config");
  {
    std::ofstream c(dir / "run.cfg");
    c << "# speed run\nfamily = path-no-repeat\nhost = pn\nn = 4\n";
  }
  Outcome a = run("speed --config " + (dir / "run.cfg").string());
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(json::parse(a.out)["n"], 4);
  Outcome b = run("speed --config " + (dir / "run.cfg").string() + " --n 5");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(json::parse(b.out)["n"], 5);
  EXPECT_EQ(json::parse(b.out)["speed"], "24");
  fs::remove_all(dir);
}

TEST(Cli, EncodeMultigraph) {
  fs::path dir = scratch("encode");
  {
    std::ofstream in(dir / "m.txt");
    in << "3\n1 2 2\n1 3 1\n2 3 1\n";
  }
  Outcome r = run("encode --kind multigraph --d 3 --input " + (dir / "m.txt").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["colours"], json::parse("[3, 2, 2]"));
  EXPECT_EQ(run("encode --kind multigraph --d 3 --input " + (dir / "missing.txt").string()).code, 2);
  fs::remove_all(dir);
}
