#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const std::string kFixture = RULCAST_FIXTURE_DIR;
const std::string kBinary = RULCAST_BINARY;

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rulcast_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args, const fs::path& dir) {
  auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  std::string cmd = "'" + kBinary + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("rul writes three artifacts") {
    auto dir = scratch("rul");
    auto r = run("rul --config '" + kFixture + "/run.toml' --out '" + dir.string() + "'", dir);
    CHECK(r.code == 0);
    for (const char* f : {"rul.csv", "rul.json", "rul.svg"}) {
      CHECK(fs::exists(dir / f));
      CHECK(r.out.find(f) != std::string::npos);
    }
    auto svg = slurp(dir / "rul.svg");
    CHECK(svg.find("id=\"threshold\"") != std::string::npos);
    CHECK(slurp(dir / "rul.csv").rfind("combo,version,cumulative_cpv,cluster,predicted_rt_ms,extrapolated,crossed\n", 0) == 0);
  }

  TEST_CASE("parameter errors exit 2 with usage") {
    auto dir = scratch("k99");
    auto r = run("cluster --config '" + kFixture + "/run.toml' --k 99 --out '" + dir.string() + "'", dir);
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
    CHECK(run("cluster --no-such-flag", dir).code == 2);
    CHECK(run("", dir).code == 2);
  }

  TEST_CASE("fitting a two-point cluster exits 1") {
    // Keep only two of the slow releases so cluster B has two members.
    auto dir = scratch("two");
    std::ifstream in(kFixture + "/rt_samples.csv");
    std::ofstream rt(dir / "rt_samples.csv");
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("5.0.6,", 0) != 0) rt << line << '\n';
    rt.close();
    auto r = run("fit --config '" + kFixture + "/run.toml' --rt '" + (dir / "rt_samples.csv").string() +
                     "' --cluster B --out '" + dir.string() + "'",
                 dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("insufficient data") != std::string::npos);
  }

  TEST_CASE("ingest reports quality") {
    auto dir = scratch("ingest");
    auto r = run("ingest --issues '" + kFixture + "/issues.csv' --quality-format json --out '" + dir.string() + "'", dir);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "issues.csv"));
    CHECK(fs::exists(dir / "quality.json"));
  }
}
