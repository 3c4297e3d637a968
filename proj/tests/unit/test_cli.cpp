#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gqt_cli/cli.hpp"

namespace fs = std::filesystem;
using gqt::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "gqt");
  std::ostringstream out, err;
  const int code = gqt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gqt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& text) {
    const auto path = dir_ / "config.json";
    std::ofstream(path) << text;
    return path.string();
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

const char* kQubit = R"({
  "hamiltonian": {"pauli_sum": [1, 1, 1]},
  "beta": 5
})";

}  // namespace

TEST_F(CliTest, PartitionMatchesSinhFormula) {
  const auto r = run({"--config", write_config(kQubit), "partition"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  const double g = std::sqrt(3.0);
  const double q = j["data"][0]["Q"].get<double>();
  EXPECT_NEAR(q / (gqt::kPi * std::sinh(5 * g) / (5 * g)), 1.0, 1e-13);
  EXPECT_EQ(j["meta"]["command"], "partition");
}

TEST_F(CliTest, ThermoAtInfiniteTemperature) {
  const auto raw = run({"--config", write_config(kQubit), "--beta", "0", "--format", "json", "thermo"});
  ASSERT_EQ(raw.code, 0) << raw.err;
  const Json j = Json::parse(raw.out);
  EXPECT_NEAR(j["data"][0]["Hq"].get<double>(), std::log(gqt::kPi), 1e-14);
  EXPECT_TRUE(j["data"][0]["F"].is_null());

  const auto norm = run({"--config",
                         write_config(R"({"hamiltonian": {"pauli_sum": [1, 1, 1]}, "beta": 0,
                                          "convention": "normalized"})"),
                         "--format", "json", "thermo"});
  ASSERT_EQ(norm.code, 0) << norm.err;
  EXPECT_NEAR(Json::parse(norm.out)["data"][0]["Hq"].get<double>(), 0.0, 1e-14);
}

TEST_F(CliTest, ThermoCsvUsesLf) {
  const auto r = run({"--config", write_config(kQubit), "thermo"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("beta,Q,F,U,Hq,var_h\n", 0), 0u);
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  EXPECT_EQ(r.out.back(), '\n');
}

TEST_F(CliTest, JarzynskiConstantProtocol) {
  const auto r = run({"--config", write_config(R"({
      "hamiltonian": {"pauli_sum": [0, 0, 1]}, "beta": 1,
      "sampler": {"seed": 3, "samples": 200},
      "protocol": {"v": {"pauli_sum": [1, 0, 0]}, "schedule": "constant", "lambda": 0.5, "n_steps": 10}})"),
                      "jarzynski"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json d = Json::parse(r.out)["data"];
  EXPECT_EQ(d["mean_exp_neg_beta_W"].get<double>(), 1.0);
  EXPECT_EQ(d["std_error"].get<double>(), 0.0);
}

TEST_F(CliTest, UnknownKeyListsValidKeys) {
  const auto r = run({"--config", write_config(R"({"dimension": 2, "betta": 1})"), "partition"});
  EXPECT_EQ(r.code, gqt::cli::kConfigError);
  EXPECT_NE(r.err.find("betta"), std::string::npos);
  EXPECT_NE(r.err.find("beta_grid"), std::string::npos);
}

TEST_F(CliTest, NonHermitianRejected) {
  const auto r = run({"--config", write_config(R"({"hamiltonian": [[0, 1], [0, 0]], "beta": 1})"), "partition"});
  EXPECT_EQ(r.code, gqt::cli::kConfigError);
}

TEST_F(CliTest, DegenerateSpectrumSuggestsMonteCarlo) {
  const auto r = run({"--config", write_config(R"({"hamiltonian": {"diagonal": [0, 1, 1]}, "beta": 1})"),
                      "partition"});
  EXPECT_EQ(r.code, gqt::cli::kDegenerate);
  EXPECT_NE(r.err.find("Monte Carlo"), std::string::npos);
}

TEST_F(CliTest, PrintConfigRoundTrips) {
  const auto cfg = write_config(kQubit);
  const auto first = run({"--config", cfg, "--seed", "11", "print-config"});
  ASSERT_EQ(first.code, 0) << first.err;
  const Json j = Json::parse(first.out);
  EXPECT_EQ(j["sampler"]["seed"], 11);
  const auto again = run({"--config", write_config(first.out), "print-config"});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(again.out, first.out);
}

TEST_F(CliTest, OutWritesFileAtomically) {
  const auto target = dir_ / "q.json";
  const auto r = run({"--config", write_config(kQubit), "--out", target.string(), "partition"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(fs::exists(target.string() + ".tmp"));
  const auto direct = run({"--config", write_config(kQubit), "partition"});
  EXPECT_EQ(slurp(target), direct.out);
}

TEST_F(CliTest, SampleIsByteDeterministic) {
  const auto cfg = write_config(R"({"hamiltonian": {"pauli_sum": [1, 1, 1]}, "beta": 2,
                                    "sampler": {"seed": 5, "samples": 20000, "streams": 3}})");
  const auto a = run({"--config", cfg, "sample"});
  const auto b = run({"--config", cfg, "sample"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto c = run({"--config", cfg, "--seed", "6", "sample"});
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, HelpListsSubcommands) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  const std::string text = r.out + r.err;
  for (const char* name : {"volume", "dos", "partition", "thermo", "sample", "jarzynski", "firstlaw", "sweep",
                           "bipartite", "print-config", "--seed", "--format"}) {
    EXPECT_NE(text.find(name), std::string::npos) << name;
  }
}

TEST_F(CliTest, MissingSubcommandIsUsageError) {
  EXPECT_EQ(run({}).code, gqt::cli::kConfigError);
  EXPECT_EQ(run({"frobnicate"}).code, gqt::cli::kConfigError);
}

TEST(ParseConfig, DefaultsAndGrids) {
  const auto c = gqt::cli::parse_config(Json::parse(R"({"dimension": 3, "beta_grid": {"start": 0, "stop": 1, "count": 5}})"));
  EXPECT_EQ(c.betas().size(), 5u);
  EXPECT_DOUBLE_EQ(c.betas()[1], 0.25);
  EXPECT_EQ(c.hamiltonian_or_default().matrix()(2, 2), gqt::complex(2.0, 0.0));
  EXPECT_THROW(gqt::cli::parse_config(Json::parse(R"({"beta": 1, "beta_grid": [1, 2]})")), gqt::cli::ConfigError);
  EXPECT_THROW(gqt::cli::parse_config(Json::parse(R"({"dimension": 3, "hamiltonian": {"diagonal": [0, 1]}})")),
               gqt::cli::ConfigError);
  EXPECT_THROW(gqt::cli::parse_config(Json::parse(R"({"shell": {"energy": 0, "width": 0}})")),
               gqt::cli::ConfigError);
}
