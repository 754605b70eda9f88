#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run lacomp(const std::string& args, bool merge_stderr = true) {
  std::string cmd = std::string(LACOMP_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

const std::string kGwas = std::string(LACOMP_PROBLEM_DIR) + "/gwas.prob";

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "lacomp_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("cost report holds the three table rows") {
  Run r = lacomp("--input " + kGwas + " --emit cost");
  CHECK(r.status == 0);
  CHECK(r.out.find("single O(n^3) ") != std::string::npos);
  CHECK(r.out.find("1D     O(n^3 + m p n^2) ") != std::string::npos);
  CHECK(r.out.find("2D     O(t n^3 + m t p n^2) ") != std::string::npos);
  CHECK(r.out.find("2D     O(n^3 + m p n^2 + m t p^2 n) ") != std::string::npos);
  CHECK(r.out.find("Algorithm ") == std::string::npos);
}

TEST_CASE("default output lists algorithms and costs") {
  Run r = lacomp("--input " + kGwas + " --top 2");
  CHECK(r.status == 0);
  CHECK(r.out.find("Algorithm alg-1: scal-add potrf trsm syrk potrf trsv gemv trsv trsv") != std::string::npos);
  CHECK(r.out.find("  L*L' = M  (potrf)") != std::string::npos);
  CHECK(r.out.find("alg-2: ") != std::string::npos);
  CHECK(r.out.find("alg-3") == std::string::npos);
}

TEST_CASE("validation against the oracle") {
  Run r = lacomp("--input " + kGwas + " --emit cost --validate n=32,p=3,m=4,t=3,seed=7");
  CHECK(r.status == 0);
  CHECK(r.out.find("algorithms match oracle (m=4,n=32,p=3,t=3, seed 7, 20 instances") != std::string::npos);
  CHECK(r.out.find("MISMATCH") == std::string::npos);
}

TEST_CASE("validation sizes default to the problem file") {
  Run r = lacomp("--input " + kGwas + " --emit cost --top 1 --validate");
  CHECK(r.status == 0);
  CHECK(r.out.find("all 1 algorithms match oracle (m=4,n=32,p=3,t=3, seed 1") != std::string::npos);
}

TEST_CASE("json export") {
  Run r = lacomp("--input " + kGwas + " --emit json --top 3 --validate seed=2,trials=2", false);
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["algorithms"].size() == 3);
  CHECK(j["algorithms"][0]["kernels"][1] == "potrf");
  CHECK(j["algorithms"][0]["cost"]["1D"]["big_o"] == "O(n^3 + m p n^2)");
  CHECK(j["derivation"]["algorithms_found"].get<int>() >= 10);
  CHECK(j["validation"]["all_match"] == true);
  CHECK(j["validation"]["trials"] == 2);
}

TEST_CASE("code files in an output directory") {
  auto dir = scratch("out");
  std::filesystem::remove_all(dir);
  Run r = lacomp("--input " + kGwas + " --emit code,json --top 1 --output-dir " + dir.string());
  CHECK(r.status == 0);
  CHECK(std::filesystem::exists(dir / "alg-1.single.pseudo"));
  CHECK(std::filesystem::exists(dir / "alg-1.2D.pseudo"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "alg-1.1D.pseudo");
  std::string first;
  std::getline(in, first);
  CHECK(first == "# algorithm alg-1");
}

TEST_CASE("usage errors exit with 2") {
  CHECK(lacomp("").status == 2);
  CHECK(lacomp("--input " + kGwas + " --emit pictures").status == 2);
  CHECK(lacomp("--input " + kGwas + " --target c").status == 2);
  CHECK(lacomp("--input " + kGwas + " --validate n=x").status == 2);
  CHECK(lacomp("--input /does/not/exist.prob").status == 2);
}

TEST_CASE("parse errors exit with 2 and a location") {
  auto bad = scratch("bad.prob");
  std::ofstream(bad) << "size n\noperand A n x n : Matrix\nequation b = inv(A\n";
  Run r = lacomp("--input " + bad.string());
  CHECK(r.status == 2);
  CHECK(r.out.find(bad.string() + ":3:") != std::string::npos);
  CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("exhausted limits exit with 3") {
  CHECK(lacomp("--input " + kGwas + " --max-depth 2").status == 3);
  CHECK(lacomp("--input " + kGwas + " --max-nodes 10").status == 3);
}

TEST_CASE("node limit from the environment") {
  std::string cmd = "LACOMP_MAX_NODES=10 " + std::string(LACOMP_CLI) + " --input " + kGwas + " >/dev/null 2>&1";
  int raw = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(raw) == 3);
}

TEST_CASE("a validation mismatch exits with 4") {
  // trsv declared over the transposed triangle: the executed kernel no
  // longer computes the matched segment.
  std::ifstream in(std::string(LACOMP_PROBLEM_DIR) + "/../catalog/default.kernels");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto at = text.find("kernel trsv: inv(T)*x");
  REQUIRE(at != std::string::npos);
  text.replace(at, std::string("kernel trsv: inv(T)*x").size(), "kernel trsv: inv(T')*x");
  auto cat = scratch("wrong.kernels");
  std::ofstream(cat) << text;
  Run r = lacomp("--input " + kGwas + " --catalog " + cat.string() + " --emit cost --validate trials=1");
  CHECK(r.status == 4);
  CHECK(r.out.find("MISMATCH") != std::string::npos);
}
