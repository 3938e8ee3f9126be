#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {
const std::string kCli = QRHT_CLI_PATH;

int run(const std::string& args) {
  const int rc = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / name; }
}  // namespace

TEST_CASE("factor refuses wide matrices with exit code 2") {
  const fs::path wide = tmp("qrht_wide.mtx");
  std::ofstream(wide) << "%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n";
  CHECK(run("factor " + wide.string()) == 2);
  fs::remove(wide);
}

TEST_CASE("factor of the identity reports a tiny residual") {
  const fs::path in = tmp("qrht_id.mtx");
  std::ofstream(in) << "%%MatrixMarket matrix array real general\n3 3\n1\n0\n0\n0\n1\n0\n0\n0\n1\n";
  const std::string prefix = tmp("qrht_id_out").string();
  REQUIRE(run("--output " + prefix + " factor " + in.string()) == 0);
  const auto rep = nlohmann::json::parse(slurp(prefix + "_report.json"));
  CHECK(rep["residual"].get<double>() <= 1e-14);
  CHECK(rep["triangular_ok"].get<bool>());
  CHECK(fs::exists(prefix + "_q.mtx"));
  CHECK(fs::exists(prefix + "_r.mtx"));
  for (const char* suf : {"_q.mtx", "_r.mtx", "_report.json"}) fs::remove(prefix + suf);
  fs::remove(in);
}

TEST_CASE("seeded random factorizations are reproducible") {
  const std::string p1 = tmp("qrht_det1").string(), p2 = tmp("qrht_det2").string();
  REQUIRE(run("--seed 7 --output " + p1 + " factor --random 16 16") == 0);
  REQUIRE(run("--seed 7 --output " + p2 + " factor --random 16 16") == 0);
  CHECK(slurp(p1 + "_r.mtx") == slurp(p2 + "_r.mtx"));
  CHECK(slurp(p1 + "_q.mtx") == slurp(p2 + "_q.mtx"));
  for (const std::string& p : {p1, p2})
    for (const char* suf : {"_q.mtx", "_r.mtx", "_report.json"}) fs::remove(p + suf);
}

TEST_CASE("analyze emits csv with the schema header") {
  const fs::path out = tmp("qrht_theta.csv");
  REQUIRE(run("--output " + out.string() + " analyze --sizes 4 8 16") == 0);
  const std::string body = slurp(out);
  CHECK(body.rfind("# schema_version=1\nn,theta,beta_ht,beta_mht\n", 0) == 0);
  fs::remove(out);
}

TEST_CASE("simulate writes a json cycle report") {
  const fs::path out = tmp("qrht_sim.json");
  REQUIRE(run("--output " + out.string() + " simulate --routine mht --n 32") == 0);
  const auto rep = nlohmann::json::parse(slurp(out));
  CHECK(rep["report"]["total_cycles"].get<std::uint64_t>() > 0);
  CHECK(rep["report"]["utilization"].get<double>() <= 1.0);
  fs::remove(out);
}

TEST_CASE("eig subcommand converges on a file input") {
  const fs::path in = tmp("qrht_eig.mtx");
  std::ofstream(in) << "%%MatrixMarket matrix array real general\n2 2\n2\n1\n1\n2\n";
  const fs::path out = tmp("qrht_eig.json");
  REQUIRE(run("--output " + out.string() + " eig " + in.string()) == 0);
  const auto rep = nlohmann::json::parse(slurp(out));
  CHECK(rep["converged"].get<bool>());
  CHECK(std::abs(rep["values"][0].get<double>() - 3.0) <= 1e-9);
  fs::remove(in);
  fs::remove(out);
}
