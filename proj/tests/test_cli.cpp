#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "borelcalc/cli.hpp"

using namespace borelcalc;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content) {
    path = std::string("/tmp/borelcalc_test_") + name;
    std::ofstream out(path, std::ios::trunc);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::pair<int, std::string> run_job(JobConfig job) {
  std::ostringstream os;
  const int code = run(job, os);
  return {code, os.str()};
}

const char* kDiag12 = R"({"re": [[1, 0], [0, 2]]})";

}  // namespace

TEST_CASE("apply squares a diagonal matrix") {
  TempFile a("diag12.json", kDiag12);
  JobConfig job;
  job.command = Command::Apply;
  job.matrix_paths = {a.path};
  job.expr = "z1^2";
  job.format = "json";
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  json rep = json::parse(text);
  REQUIRE(rep["pass"].get<bool>());
  ComplexMatrix m = matrix_from_json(rep["result"]["matrix"]);
  REQUIRE((m - ComplexMatrix::diagonal({1.0, 4.0})).frobenius_norm() <= 1e-10);
  REQUIRE(rep["version"].get<std::string>() == kVersionString);
  REQUIRE(rep.contains("seed"));
  REQUIRE(rep.contains("tolerances"));
}

TEST_CASE("verify reports all axioms on a normal input") {
  TempFile a("diag12v.json", kDiag12);
  JobConfig job;
  job.command = Command::Verify;
  job.matrix_paths = {a.path};
  job.format = "json";
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  json rep = json::parse(text);
  REQUIRE(rep["pass"].get<bool>());
  bool saw_mfc1 = false, saw_pvm2 = false;
  for (const auto& row : rep["checks"]) {
    if (row["name"] == "MFC1 unit") saw_mfc1 = true;
    if (row["name"] == "PVM2 resolution of identity") saw_pvm2 = true;
    REQUIRE(row["pass"].get<bool>());
  }
  REQUIRE(saw_mfc1);
  REQUIRE(saw_pvm2);
}

TEST_CASE("joint on non-commuting inputs exits 1 with a diagnostic") {
  TempFile a("jd.json", kDiag12);
  TempFile b("jswap.json", R"({"re": [[0, 1], [1, 0]]})");
  JobConfig job;
  job.command = Command::Joint;
  job.matrix_paths = {a.path, b.path};
  auto [code, text] = run_job(job);
  REQUIRE(code == 1);
  REQUIRE(text.find("NotCommuting") == std::string::npos);  // message text...
  REQUIRE(text.find("do not commute") != std::string::npos);
}

TEST_CASE("joint reproduces commuting inputs") {
  TempFile a("ja.json", kDiag12);
  TempFile b("jb.json", R"({"re": [[3, 0], [0, 4]]})");
  JobConfig job;
  job.command = Command::Joint;
  job.matrix_paths = {a.path, b.path};
  job.format = "json";
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  json rep = json::parse(text);
  REQUIRE(rep["result"]["kind"] == "joint");
  REQUIRE(rep["result"]["d"] == 2);
}

TEST_CASE("commute battery emits six named verdicts") {
  TempFile a("ca.json", kDiag12);
  TempFile b("cb.json", R"({"re": [[5, 0], [0, -1]]})");
  JobConfig job;
  job.command = Command::Commute;
  job.matrix_paths = {a.path, b.path};
  job.format = "json";
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  json rep = json::parse(text);
  for (const char* key :
       {"direct", "calculus", "transform", "ts_pair", "strong", "z_pair"}) {
    REQUIRE(rep["result"][key]["holds"].get<bool>());
    REQUIRE(rep["result"][key].contains("residual"));
  }
  REQUIRE(rep["result"]["strongly_commuting"].get<bool>());
}

TEST_CASE("transform emits T, S, Z") {
  TempFile a("ta.json", R"({"re": [[3]]})");
  JobConfig job;
  job.command = Command::Transform;
  job.matrix_paths = {a.path};
  job.format = "json";
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  json rep = json::parse(text);
  ComplexMatrix t = matrix_from_json(rep["result"]["T"]);
  REQUIRE(std::abs(t(0, 0) - cplx(0.1, 0.0)) <= 1e-12);
}

TEST_CASE("represent reports blocks and a unitary") {
  TempFile a("ra.json", R"({"re": [[1, 0, 0], [0, 1, 0], [0, 0, 2]]})");
  JobConfig job;
  job.command = Command::Represent;
  job.matrix_paths = {a.path};
  job.format = "json";
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  json rep = json::parse(text);
  REQUIRE(rep["result"]["blocks"].size() >= 2);
}

TEST_CASE("input errors exit 2") {
  SECTION("missing file") {
    JobConfig job;
    job.command = Command::Apply;
    job.matrix_paths = {"/tmp/borelcalc_does_not_exist.json"};
    job.expr = "z1";
    auto [code, text] = run_job(job);
    REQUIRE(code == 2);
  }
  SECTION("malformed expression") {
    TempFile a("pe.json", kDiag12);
    JobConfig job;
    job.command = Command::Apply;
    job.matrix_paths = {a.path};
    job.expr = "z1 + ";
    auto [code, text] = run_job(job);
    REQUIRE(code == 2);
  }
  SECTION("non-square matrix") {
    TempFile a("ns.json", R"({"re": [[1, 0]]})");
    JobConfig job;
    job.command = Command::Spectrum;
    job.matrix_paths = {a.path};
    auto [code, text] = run_job(job);
    REQUIRE(code == 2);
  }
}

TEST_CASE("non-normal apply input is a verification failure") {
  TempFile a("nn.json", R"({"re": [[0, 1], [0, 0]]})");
  JobConfig job;
  job.command = Command::Apply;
  job.matrix_paths = {a.path};
  job.expr = "z1";
  auto [code, text] = run_job(job);
  REQUIRE(code == 1);
}

TEST_CASE("identical inputs and seed give byte-identical reports") {
  TempFile a("det.json", kDiag12);
  for (const char* fmt : {"text", "json"}) {
    JobConfig job;
    job.command = Command::Verify;
    job.matrix_paths = {a.path};
    job.seed = 42;
    job.format = fmt;
    auto first = run_job(job);
    auto second = run_job(job);
    REQUIRE(first.first == second.first);
    REQUIRE(first.second == second.second);
    REQUIRE_FALSE(first.second.empty());
  }
}

TEST_CASE("text format carries version, seed and check lines") {
  TempFile a("txt.json", kDiag12);
  JobConfig job;
  job.command = Command::Verify;
  job.matrix_paths = {a.path};
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  REQUIRE(text.find("calc 0.1.0") != std::string::npos);
  REQUIRE(text.find("seed: 0") != std::string::npos);
  REQUIRE(text.find("check MFC1 unit") != std::string::npos);
  REQUIRE(text.find("overall: PASS") != std::string::npos);
}

TEST_CASE("out file receives the report") {
  TempFile a("of.json", kDiag12);
  const std::string outpath = "/tmp/borelcalc_test_report.json";
  JobConfig job;
  job.command = Command::Apply;
  job.matrix_paths = {a.path};
  job.expr = "z1";
  job.format = "json";
  job.out = outpath;
  REQUIRE(run(job) == 0);
  std::ifstream in(outpath);
  REQUIRE(in.good());
  json rep;
  in >> rep;
  REQUIRE(rep["pass"].get<bool>());
  std::remove(outpath.c_str());
}

TEST_CASE("apply via the Chebyshev route cross-checks the spectral route") {
  TempFile a("cheb.json", R"({"re": [[0.5, 0.1], [0.1, -0.5]]})");
  JobConfig job;
  job.command = Command::Apply;
  job.matrix_paths = {a.path};
  job.expr = "exp(re(z1))";
  job.cheb_degree = 24;
  job.format = "json";
  auto [code, text] = run_job(job);
  REQUIRE(code == 0);
  json rep = json::parse(text);
  bool saw_cross_check = false;
  for (const auto& row : rep["checks"])
    if (row["name"] == "chebyshev vs spectral route") {
      saw_cross_check = true;
      REQUIRE(row["pass"].get<bool>());
    }
  REQUIRE(saw_cross_check);
  REQUIRE(rep["result"].contains("interval"));
}
