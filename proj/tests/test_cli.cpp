#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "bomp/csv.hpp"
#include "bomp/experiments.hpp"
#include "cli.hpp"

using namespace bomp;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bomp");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("bomp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
    dict_ = gen_dictionary(40, 80, 4, 3);
    signal_ = gen_signal(20, 4, 2, 4);
    noise_ = gen_noise(40, 0.01, 5);
    write("A.csv", dict_.matrix());
    write("x.csv", signal_.values());
    write("w.csv", noise_);
    write("y.csv", Vector(dict_.matrix() * signal_.values() + noise_));
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  void write(const std::string& name, const Matrix& m) const { write_csv_matrix(dir_ / name, m); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
  BlockDictionary dict_{Matrix::Identity(1, 1), 1};
  BlockSparseSignal signal_{Vector::Zero(1), {1, 1}, BlockSupport({}, 1)};
  Vector noise_;
};

}  // namespace

TEST_F(CliTest, Coherence) {
  const Result r = invoke({"coherence", "--matrix", path("A.csv"), "--block-size", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("L"), 20);
  EXPECT_DOUBLE_EQ(doc.at("mu").get<double>(), coherence(dict_));
  EXPECT_DOUBLE_EQ(doc.at("mu_block").get<double>(), block_coherence(dict_));
  EXPECT_EQ(doc.at("maximizers").at("mu_block").at("pair").size(), 2u);
}

TEST_F(CliTest, RecoverKnownK) {
  const std::string support = std::to_string(signal_.support().indices()[0]) + "," +
                              std::to_string(signal_.support().indices()[1]);
  const Result r = invoke({"recover", "--matrix", path("A.csv"), "--block-size", "4",
                           "--measurements", path("y.csv"), "--k", "2", "--true-support", support});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  const Vector y = dict_.matrix() * signal_.values() + noise_;
  const RecoveryTrace t = bomp::bomp(y, dict_, StoppingRule::known_k(2), signal_.support());
  EXPECT_EQ(doc.at("chosen").get<std::vector<Index>>(), t.chosen);
  EXPECT_EQ(doc.at("gammas").size(), 2u);
  EXPECT_EQ(doc.at("stop_reason"), "k_reached");
  EXPECT_EQ(doc.at("estimate").size(), 80u);
}

TEST_F(CliTest, RecoverTolerance) {
  const Result r = invoke({"recover", "--matrix", path("A.csv"), "--block-size", "4",
                           "--measurements", path("y.csv"), "--epsilon", "1e-12",
                           "--max-iters", "3", "--solver", "omp"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("solver"), "omp");
  EXPECT_LE(doc.at("iterations").get<int>(), 12);
}

TEST_F(CliTest, RecoverNeedsAStoppingRule) {
  const Result r = invoke({"recover", "--matrix", path("A.csv"), "--block-size", "4",
                           "--measurements", path("y.csv")});
  EXPECT_EQ(r.code, 1);
  const Result both = invoke({"recover", "--matrix", path("A.csv"), "--block-size", "4",
                              "--measurements", path("y.csv"), "--k", "1", "--epsilon", "0.1"});
  EXPECT_EQ(both.code, 1);
}

TEST_F(CliTest, Certify) {
  const Result r = invoke({"certify", "--matrix", path("A.csv"), "--block-size", "4", "--signal",
                           path("x.csv"), "--noise", path("w.csv"), "--operator-norm-trials", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("K"), 2);
  for (const char* kind : {"noiseless_block", "theorem1", "omp_tropp", "bomp_orthonormal"}) {
    EXPECT_TRUE(doc.at("certificates").contains(kind)) << kind;
  }
  EXPECT_EQ(doc.at("certificates").at("bomp_orthonormal").at("applicable"), false);
  EXPECT_TRUE(doc.at("comparison_chain").is_null());
  EXPECT_EQ(doc.at("appendix_bounds").size(), 2u);
}

TEST_F(CliTest, CertifyOrthonormalBlocksIncludesChain) {
  write("Q.csv", orthogonalize_blocks(dict_).dictionary.matrix());
  const Result r = invoke({"certify", "--matrix", path("Q.csv"), "--block-size", "4", "--signal",
                           path("x.csv"), "--noise", path("w.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("certificates").at("bomp_orthonormal").at("applicable"), true);
  EXPECT_TRUE(doc.at("comparison_chain").at("all_hold").get<bool>());
}

TEST_F(CliTest, SweepFormats) {
  const Result csv = invoke({"sweep", "--m", "20", "--n", "40", "--d", "2", "--k-list", "1,2",
                             "--sigma-list", "0.05", "--trials", "5", "--threads", "2"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  std::istringstream in(csv.out);
  EXPECT_EQ(parse_sweep_csv(in).size(), 4u);

  const Result js = invoke({"sweep", "--m", "20", "--n", "40", "--d", "2", "--k-list", "1",
                            "--trials", "3", "--solvers", "bomp", "--format", "json", "--no-certify"});
  ASSERT_EQ(js.code, 0) << js.err;
  const json doc = json::parse(js.out);
  EXPECT_EQ(doc.at("cells").size(), 4u);  // default noise grid
  EXPECT_EQ(doc.at("metadata").at("default_noise_grid"), true);
  EXPECT_EQ(doc.at("config").at("certify"), false);

  const std::string svg = path("fig.svg");
  const Result sv = invoke({"sweep", "--m", "20", "--n", "40", "--d", "2", "--k-list", "1,2",
                            "--sigma-list", "0", "--trials", "2", "--format", "svg", "--out", svg});
  ASSERT_EQ(sv.code, 0) << sv.err;
  std::ifstream f(svg);
  std::stringstream text;
  text << f.rdbuf();
  EXPECT_NE(text.str().find("<polyline"), std::string::npos);
}

TEST_F(CliTest, SweepConfigFileWithOverride) {
  std::ofstream(dir_ / "cfg.json") << R"({"m": 20, "n": 40, "d": 2, "k_values": [1, 2],
    "sigma_w": [0.0], "trials": 4, "solvers": ["bomp"]})";
  const Result r = invoke({"sweep", "--config", path("cfg.json"), "--trials", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto cells = parse_sweep_csv(in);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].trials, 2);
}

TEST_F(CliTest, BadInputs) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"coherence", "--matrix", path("missing.csv"), "--block-size", "4"}).code, 1);
  EXPECT_EQ(invoke({"coherence", "--matrix", path("A.csv"), "--block-size", "3"}).code, 1);
  EXPECT_EQ(invoke({"sweep", "--m", "20", "--n", "40", "--d", "2", "--k-list", "11"}).code, 1);
  EXPECT_EQ(invoke({"sweep", "--format", "png"}).code, 1);
}
