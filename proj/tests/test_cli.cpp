#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isocalc/cli.hpp"
#include "isocalc/json_io.hpp"

using namespace isocalc;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("isocalc_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    out_.str({});
    err_.str({});
    return cli::run(args, out_, err_);
  }

  json output() const { return json::parse(out_.str()); }
  json error() const { return json::parse(err_.str()); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

HMatrix parse_result(const json& j, const char* key = "result") { return matrix_from_json(j.at(key)); }

}  // namespace

TEST_F(CliTest, ApplySquare) {
  const auto a = write("a.json", R"({"d":2,"re":[[2,0],[0,1]]})");
  ASSERT_EQ(run({"apply", "--field", "scalar_lift:square", "--matrix", a}), 0) << err_.str();
  const HMatrix r = parse_result(output());
  EXPECT_NEAR((r.matrix() - HMatrix::diagonal(RealVector<double>{{4, 1}}).matrix()).norm(), 0, 1e-14);
}

TEST_F(CliTest, ApplyProjection) {
  const auto a = write("a.json", R"({"d":2,"re":[[2,0],[0,0]]})");
  ASSERT_EQ(run({"apply", "--field", "top_block_projection", "--matrix", a}), 0);
  EXPECT_NEAR((parse_result(output()).matrix() - HMatrix::diagonal(RealVector<double>{{1, 0}}).matrix()).norm(), 0,
              1e-15);
}

TEST_F(CliTest, ApplyProjectionAtMultiplicity) {
  const auto a = write("a.json", R"({"d":2,"re":[[2,0],[0,2]]})");
  EXPECT_EQ(run({"apply", "--field", "top_block_projection", "--matrix", a}), 3);
  EXPECT_EQ(error()["kind"], "well_definedness");
  EXPECT_EQ(error()["exit_code"], 3);
}

TEST_F(CliTest, DerivativeExamples) {
  const auto a = write("a.json", R"({"d":2,"re":[[2,0],[0,1]]})");
  const auto e = write("e.json", R"({"d":2,"re":[[0,1],[1,0]]})");
  ASSERT_EQ(run({"derivative", "--field", "scalar_lift:square", "--matrix", a, "--direction", e}), 0);
  const json j = output();
  EXPECT_NEAR(parse_result(j)(0, 1).real(), 3, 1e-14);
  EXPECT_NEAR(parse_result(j)(0, 0).real(), 0, 1e-14);
  EXPECT_NEAR(j["divided_difference"][0][0].get<double>(), 4, 1e-14);
  EXPECT_NEAR(j["divided_difference"][0][1].get<double>(), 3, 1e-14);

  const auto i = write("i.json", R"({"d":2,"re":[[1,0],[0,1]]})");
  const auto e2 = write("e2.json", R"({"d":2,"re":[[0.3,-1],[-1,2]],"im":[[0,0.5],[-0.5,0]]})");
  ASSERT_EQ(run({"derivative", "--field", "paper_gap_square", "--matrix", i, "--direction", e2}), 0);
  EXPECT_EQ(parse_result(output()).matrix().norm(), 0);
  EXPECT_LE(output()["structure_residual"].get<double>(), 1e-8);

  ASSERT_EQ(run({"derivative", "--field", "scalar_lift:identity", "--matrix", a, "--direction", e2}), 0);
  EXPECT_LE((parse_result(output()).matrix() - matrix_from_json(json::parse(
                                                   R"({"d":2,"re":[[0.3,-1],[-1,2]],"im":[[0,0.5],[-0.5,0]]})"))
                                                   .matrix())
                .norm(),
            1e-14);
}

TEST_F(CliTest, StructureViolationExit) {
  // merging the blocks of +-1 makes |x| block-constant with an unstructured Jacobian
  const auto a = write("a.json", R"({"d":2,"re":[[1,0],[0,-1]]})");
  EXPECT_EQ(run({"derivative", "--field", "scalar_lift:abs", "--matrix", a, "--direction", a, "--block-tol", "3"}), 5);
  EXPECT_EQ(error()["kind"], "structure_violation");
}

TEST_F(CliTest, NumericalFailureExit) {
  const auto a = write("a.json", R"({"d":2,"re":[[0,0],[0,-3]]})");
  EXPECT_EQ(run({"apply", "--field", "sqrt_shifted:2", "--matrix", a}), 4);
  EXPECT_EQ(error()["kind"], "numerical_failure");
}

TEST_F(CliTest, ProjectExamples) {
  const auto a = write("a.json", R"({"d":2,"re":[[2,0],[0,0]]})");
  ASSERT_EQ(run({"project", "--matrix", a, "--block", "1"}), 0);
  EXPECT_NEAR((parse_result(output(), "projector").matrix() - HMatrix::diagonal(RealVector<double>{{1, 0}}).matrix()).norm(),
              0, 1e-10);
  EXPECT_LE(output()["residual"].get<double>(), 1e-10);

  const auto s = write("s.json", R"({"d":3,"re":[[0.5,0,0],[0,0.5,0],[0,0,0.5]]})");
  ASSERT_EQ(run({"project", "--matrix", s, "--block", "1"}), 0);
  EXPECT_NEAR((parse_result(output(), "projector").matrix() - HMatrix::identity(3).matrix()).norm(), 0, 1e-14);

  const auto n = write("n.json", R"({"d":2,"re":[[1.000000001,0],[0,0.999999999]]})");
  EXPECT_EQ(run({"project", "--matrix", n, "--block", "1"}), 6);
  EXPECT_EQ(error()["kind"], "ill_conditioned_contour");
  EXPECT_EQ(run({"project", "--matrix", a, "--block", "3"}), 2);
}

TEST_F(CliTest, InputErrors) {
  const auto bad = write("bad.json", "{nope");
  EXPECT_EQ(run({"apply", "--field", "scalar_lift:square", "--matrix", bad}), 2);
  EXPECT_EQ(error()["kind"], "parse_error");
  EXPECT_EQ(run({"apply", "--field", "scalar_lift:square", "--matrix", (dir_ / "missing.json").string()}), 2);
  const auto a = write("a.json", R"({"d":2,"re":[[2,0],[0,1]]})");
  EXPECT_EQ(run({"apply", "--field", "no_such_field", "--matrix", a}), 2);
  EXPECT_EQ(run({"apply", "--matrix", a}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({"check", "everything"}), 2);
  const auto e3 = write("e3.json", R"({"d":3,"re":[[1,0,0],[0,1,0],[0,0,1]]})");
  EXPECT_EQ(run({"derivative", "--field", "scalar_lift:square", "--matrix", a, "--direction", e3}), 2);
  EXPECT_EQ(error()["kind"], "dimension_mismatch");
}

TEST_F(CliTest, CheckAll) {
  ASSERT_EQ(run({"check", "all", "--seed", "7", "--d", "5"}), 0) << out_.str();
  const json j = output();
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_GE(j["reports"].size(), 10u);
  bool saw_counterexample = false;
  for (const auto& r : j["reports"]) {
    EXPECT_TRUE(r["passed"].get<bool>()) << r.dump();
    saw_counterexample |= r["expected_failure"].get<bool>();
  }
  EXPECT_TRUE(saw_counterexample);
}

TEST_F(CliTest, CheckCounterexampleAndMultiplicities) {
  ASSERT_EQ(run({"check", "lipschitz", "--field", "top_block_projection"}), 0);
  const json j = output();
  ASSERT_EQ(j["reports"].size(), 1u);
  EXPECT_TRUE(j["reports"][0]["expected_failure"].get<bool>());
  EXPECT_GE(j["reports"][0]["metrics"]["ratio"].get<double>(), 400);

  ASSERT_EQ(run({"check", "frechet", "--field", "scalar_lift:exp", "--multiplicities", "2,2,1"}), 0);
  for (const auto& r : output()["reports"]) EXPECT_LE(r["worst_violation"].get<double>(), 1e-6);
  EXPECT_EQ(run({"check", "frechet", "--field", "scalar_lift:exp", "--multiplicities", "2,2", "--d", "5"}), 2);
}

TEST_F(CliTest, CheckIsDeterministic) {
  ASSERT_EQ(run({"check", "all", "--seed", "3"}), 0);
  const std::string first = out_.str();
  ASSERT_EQ(run({"check", "all", "--seed", "3"}), 0);
  EXPECT_EQ(out_.str(), first);
  ASSERT_EQ(run({"check", "all", "--seed", "4"}), 0);
  EXPECT_NE(out_.str(), first);
}

TEST_F(CliTest, OutputFileRoundTrip) {
  const auto a = write("a.json", R"({"d":3,"re":[[1,0.2,0],[0.2,0.5,0.1],[0,0.1,-1]],"im":[[0,0.3,0],[-0.3,0,0],[0,0,0]]})");
  const auto o = (dir_ / "out.json").string();
  ASSERT_EQ(run({"apply", "--field", "scalar_lift:exp", "--matrix", a, "--output", o}), 0);
  EXPECT_TRUE(out_.str().empty());
  std::ifstream in(o);
  const HMatrix from_file = parse_result(json::parse(in));
  ASSERT_EQ(run({"apply", "--field", "scalar_lift:exp", "--matrix", a}), 0);
  EXPECT_TRUE(from_file == parse_result(output()));
}

TEST_F(CliTest, Catalog) {
  ASSERT_EQ(run({"catalog"}), 0);
  EXPECT_GE(output()["fields"].size(), 10u);
}

TEST_F(CliTest, ExecutableExitCodes) {
  const auto a = write("a.json", R"({"d":2,"re":[[2,0],[0,2]]})");
  auto status = [&](const std::string& args) {
    const std::string cmd = std::string(ISOCALC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("apply --field scalar_lift:square --matrix " + a), 0);
  EXPECT_EQ(status("apply --field top_block_projection --matrix " + a), 3);
  EXPECT_EQ(status("project --matrix " + a + " --block 1"), 0);
  EXPECT_EQ(status("apply --field scalar_lift:square"), 2);
  EXPECT_EQ(status("check hoffman_wielandt --trials 5"), 0);
}
