#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

const std::string& work_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/pcrast_cli_XXXXXX";
    const char* d = mkdtemp(tmpl);
    REQUIRE(d != nullptr);
    return std::string(d);
  }();
  return dir;
}

RunResult run(const std::string& args) {
  const std::string out_path = work_dir() + "/stdout.txt";
  const std::string err_path = work_dir() + "/stderr.txt";
  const std::string cmd =
      std::string(PCRAST_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

}  // namespace

TEST_CASE("cli: generate, info, render, verify round trip") {
  const std::string dir = work_dir();
  const std::string cloud = dir + "/cube.xyz";

  auto gen = run("generate --scene random-cube --count 3000 --seed 7 --extent 10 " + cloud);
  CHECK(gen.exit_code == 0);

  auto info = run("info " + cloud);
  CHECK(info.exit_code == 0);
  CHECK(info.out.find("points: 3000") != std::string::npos);
  CHECK(info.out.find("bounds_min:") != std::string::npos);

  auto render = run("render --input " + cloud +
                    " --eye 12 9 14 --target 0 0 0 --width 64 --height 48"
                    " --method atomicmin -o " +
                    dir + "/cube.ppm");
  CHECK(render.exit_code == 0);
  CHECK(render.out.find("points_in: 3000") != std::string::npos);
  const std::string ppm = slurp(dir + "/cube.ppm");
  CHECK(ppm.substr(0, 11) == "P6\n64 48\n25");

  auto verify = run("verify --input " + cloud +
                    " --eye 12 9 14 --target 0 0 0 --width 64 --height 48"
                    " --method splat --workers 4");
  CHECK(verify.exit_code == 0);
  CHECK(verify.out.find("matches") != std::string::npos);
}

TEST_CASE("cli: verify flags a deliberately mismatched reference epsilon") {
  auto r = run(
      "verify --scene random-cube --count 4000 --seed 3 --extent 10"
      " --eye 12 9 14 --target 0 0 0 --width 64 --height 64"
      " --method splat --epsilon 101/100 --oracle-epsilon 1/1");
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("MISMATCH at pixel") != std::string::npos);
}

TEST_CASE("cli: exit codes for usage and io failures") {
  CHECK(run("render --scene random-cube -o " + work_dir() + "/x.ppm --method warp").exit_code == 1);
  CHECK(run("generate --scene random-cube " + work_dir() + "/out.las").exit_code == 1);
  CHECK(run("").exit_code == 1);  // a subcommand is required

  auto missing = run("info /no/such/file.xyz");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("/no/such/file.xyz") != std::string::npos);

  // both or neither input source
  CHECK(run("render -o " + work_dir() + "/x.ppm").exit_code == 1);
}

TEST_CASE("cli: zfight scene demo, baseline stipples while atomicmin stays clean") {
  const std::string dir = work_dir();
  const std::string common =
      " --scene zfight-planes --count 20000 --seed 3 --extent 100 --distance 1000"
      " --separation 0.001 --width 64 --height 64 --near 0.1 --far 10000 -o ";
  auto base = run("render --method baseline-standard" + common + dir + "/base.ppm");
  auto amin = run("render --method atomicmin" + common + dir + "/amin.ppm");
  CHECK(base.exit_code == 0);
  CHECK(amin.exit_code == 0);
  const std::string a = slurp(dir + "/base.ppm");
  const std::string b = slurp(dir + "/amin.ppm");
  CHECK(a != b);
  // the baseline image carries blue pixels (0,0,255); the atomic-min one none
  const auto count_blue = [](const std::string& ppm) {
    const std::size_t payload = ppm.find("255\n") + 4;
    int n = 0;
    for (std::size_t i = payload; i + 2 < ppm.size(); i += 3)
      if (std::uint8_t(ppm[i]) == 0 && std::uint8_t(ppm[i + 1]) == 0 &&
          std::uint8_t(ppm[i + 2]) == 255)
        ++n;
    return n;
  };
  CHECK(count_blue(a) > 0);
  CHECK(count_blue(b) == 0);
}

TEST_CASE("cli: config file overrides flags") {
  const std::string dir = work_dir();
  const std::string cfg_path = dir + "/render.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "scene = random-cube\ncount = 500\nseed = 2\nextent = 8\n"
           "width = 32\nheight = 24\neye = 10 8 12\ntarget = 0 0 0\n"
           "method = atomicmin\noutput = " +
               dir + "/cfg.ppm\n";
  }
  auto r = run("render --width 999 --config " + cfg_path);
  CHECK(r.exit_code == 0);
  CHECK(slurp(dir + "/cfg.ppm").substr(0, 9) == "P6\n32 24\n");

  {
    std::ofstream cfg(cfg_path);
    cfg << "scene = random-cube\nwidth z 32\n";
  }
  auto bad = run("render --config " + cfg_path + " -o " + dir + "/never.ppm");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("line 2") != std::string::npos);
}

TEST_CASE("cli: bench produces the csv and rejects malformed configs") {
  const std::string dir = work_dir();
  const std::string cfg_path = dir + "/bench.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "scene = random-cube\ncount = 2000\nseed = 4\nextent = 10\n"
           "width = 48\nheight = 48\norbit_radius = 14\n"
           "methods = atomicmin,splat,baseline\norderings = original,shuffled,morton\n"
           "warmup = 1\nframes = 2\nworkers = 2\n";
  }
  auto r = run("bench " + cfg_path + " -o " + dir + "/bench.csv");
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir + "/bench.csv");
  CHECK(csv.find("scene,method,ordering,frame,pass1_ns,pass2_ns,pass3_ns,total_ms,fragments") !=
        std::string::npos);
  CHECK(csv.find("random-cube,atomicmin,shuffled,") != std::string::npos);
  CHECK(csv.find("random-cube,baseline,morton,") != std::string::npos);
  CHECK(csv.find("# summary,splat,original,") != std::string::npos);

  {
    std::ofstream cfg(cfg_path);
    cfg << "scene = random-cube\ncount ten\n";
  }
  auto bad = run("bench " + cfg_path);
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("line 2") != std::string::npos);

  CHECK(run("bench /no/such/bench.cfg").exit_code == 2);
}

TEST_CASE("cli: piecewise mapping flags verify against the reference") {
  auto r = run(
      "verify --scene random-cube --count 3000 --seed 11 --extent 8"
      " --eye 12 9 14 --target 0 0 0 --width 48 --height 48"
      " --method atomicmin --range 0 10 1e-9 --range 10 10000 1e-6");
  CHECK(r.exit_code == 0);
}
