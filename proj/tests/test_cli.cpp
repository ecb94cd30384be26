#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(JTIGHT_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "jtight_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("params") {
  const Result r = cli("params -k 5 -j 2");
  CHECK(r.code == 0);
  CHECK(r.out == "a=2 b=1 s=1 r=0 batch=3\n");
}

TEST_CASE("z") {
  CHECK(cli("z -k 2 -j 1 -l 4").out == "2\n");
  CHECK(cli("z -k 5 -j 2 -l 3 --brute").out == "288\n");
}

TEST_CASE("bounds and expectation") {
  const Result b = cli("bounds -n 10000 -k 3 -j 2 --eps 0.2");
  CHECK(b.code == 0);
  CHECK(b.out.find("supercritical_lower 1000\n") != std::string::npos);
  CHECK(cli("expectation -n 6 -k 3 -j 2 -l 1 -p 0.5").out == "10\n");
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli("params -k 5").code == 1);
  CHECK(cli("params -k 3 -j 3").code == 1);
  CHECK(cli("run --bogus").code == 1);
  CHECK(cli("nosuchcommand").code == 1);
}

TEST_CASE("gen then oracle") {
  const fs::path h = scratch("h.txt");
  CHECK(cli("gen -n 8 -k 3 -p 0.3 --seed 4 --out " + h.string()).code == 0);
  CHECK(slurp(h).rfind("8 3\n", 0) == 0);
  const Result o = cli("oracle --input " + h.string() + " -j 2");
  CHECK(o.code == 0);
  CHECK(o.out.find("censored 0") != std::string::npos);
  const Result tight = cli("oracle --input " + h.string() + " -j 2 --budget 3");
  CHECK(tight.code == 2);
  CHECK(tight.out.find("censored 1") != std::string::npos);
}

TEST_CASE("run is deterministic and writes a trace") {
  const fs::path t1 = scratch("t1.jsonl");
  const fs::path t2 = scratch("t2.jsonl");
  const Result a = cli("run -n 30 -k 3 -j 2 --eps 0.5 --seed 3 --trace " + t1.string());
  const Result b = cli("run -n 30 -k 3 -j 2 --eps 0.5 --seed 3 --trace " + t2.string());
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("stop_reason S1") != std::string::npos);
  CHECK(slurp(t1) == slurp(t2));
  CHECK(slurp(t1).find("\"type\":\"header\"") != std::string::npos);
}

TEST_CASE("budget exhaustion exits with 2") {
  const Result r = cli("run -n 40 -k 3 -j 2 --eps 0.5 --budget 10 --seed 3");
  CHECK(r.code == 2);
  CHECK(r.out.find("stop_reason budget") != std::string::npos);
}

TEST_CASE("config file and flags are interchangeable") {
  const fs::path cfg = scratch("run.cfg");
  {
    std::ofstream out(cfg);
    out << "# a run\nn = 30\nk = 3\nj = 2\neps = 0.5\nseed = 3\n";
  }
  const Result flags = cli("run -n 30 -k 3 -j 2 --eps 0.5 --seed 3");
  const Result file = cli("run --config " + cfg.string());
  CHECK(file.code == 0);
  CHECK(file.out == flags.out);
  // command-line flags override the file
  const Result override_seed = cli("run --config " + cfg.string() + " --seed 4");
  CHECK(override_seed.out == cli("run -n 30 -k 3 -j 2 --eps 0.5 --seed 4").out);
}

TEST_CASE("sweep with a config file matches the preset flags") {
  const fs::path cfg = scratch("sweep.cfg");
  {
    std::ofstream out(cfg);
    out << "k = 3\nj = 2\nn = 20,30\neps = 0.5,-0.5\ntrials = 3\nmode = pathfinder_explicit\ntiming = false\n";
  }
  const fs::path a = scratch("a.csv");
  const fs::path b = scratch("b.csv");
  CHECK(cli("sweep --config " + cfg.string() + " --out " + a.string()).code == 0);
  CHECK(cli("sweep --preset smoke --timing false --out " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("n,k,j,eps,p,seed,trial,mode,L,censored,queries,new_starts,edges,stop_reason,ms\n", 0) == 0);
}

TEST_CASE("verify suites") {
  const Result le = cli("verify --suite lazy-explicit -n 20 --trials 100");
  CHECK(le.code == 0);
  CHECK(le.out.find("100/100 traces identical") != std::string::npos);
  const Result z = cli("verify --suite z");
  CHECK(z.code == 0);
  const Result ob = cli("verify --suite oracle-bound -n 10 --trials 20");
  CHECK(ob.code == 0);
}
