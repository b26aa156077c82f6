#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "nullstream/errors.hpp"
#include "nullstream/io.hpp"
#include "nullstream/streaming.hpp"

using namespace nullstream;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "nullstream");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nullstream_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<std::string> read_lines(const std::string& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string l;
  while (std::getline(in, l)) lines.push_back(l);
  return lines;
}

}  // namespace

TEST_F(CliTest, GenWritesLoadableInstance) {
  const auto o = run({"gen", "anv-conditioned", "--d", "64", "--seed", "7", "--out", path("a.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  const Json diag = Json::parse(o.out);
  EXPECT_GE(diag.at("witness_e1").get<double>(), 0.2);
  const InstanceFile f = load_instance(path("a.json"));
  EXPECT_EQ(f.d, 64u);
  EXPECT_EQ(f.type, "anv-conditioned");

  const auto to_stdout = run({"gen", "anv-gaussian", "--d", "5"});
  ASSERT_EQ(to_stdout.code, 0);
  EXPECT_EQ(instance_from_json(Json::parse(to_stdout.out)).d, 5u);
  EXPECT_FALSE(to_stdout.err.empty());
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::kExitValidation);
  EXPECT_EQ(run({"gen", "nonsense"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"gen", "anv-gaussian", "--d", "abc"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"gen", "lsp-hard", "--d", "5"}).code, cli::kExitValidation);

  const auto rare = run({"gen", "anv-conditioned", "--d", "1024", "--cf", "0.2"});
  EXPECT_EQ(rare.code, cli::kExitInfeasible);
  EXPECT_NE(rare.err.find("probability"), std::string::npos);

  ASSERT_EQ(run({"gen", "anv-gaussian", "--d", "16", "--out", path("g.json")}).code, 0);
  const auto ok = run({"run", "--instance", path("g.json"), "--alg", "offline-kernel", "--budget",
                       "20000"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_LT(Json::parse(ok.out).at("loss").get<double>(), 1e-12);
  EXPECT_EQ(Json::parse(ok.out).at("peak_state_bits"), 64 + 15 * 16 * 64);

  EXPECT_EQ(run({"run", "--instance", path("g.json"), "--alg", "offline-kernel", "--budget", "1024"})
                .code,
            cli::kExitBudget);
  EXPECT_EQ(run({"run", "--instance", path("g.json"), "--alg", "zero", "--via", "lsp", "--budget",
                 "64"})
                .code,
            cli::kExitAlgorithm);
  EXPECT_EQ(run({"run", "--instance", path("missing.json"), "--alg", "zero", "--budget", "64"}).code,
            cli::kExitValidation);
}

TEST_F(CliTest, RunWritesCsv) {
  ASSERT_EQ(run({"gen", "lr", "--d", "12", "--out", path("lr.json")}).code, 0);
  const auto o = run({"run", "--instance", path("lr.json"), "--alg", "zero", "--budget", "64",
                      "--csv", path("m.csv")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_DOUBLE_EQ(Json::parse(o.out).at("loss").get<double>(), 0.2 * 0.2);
  const auto lines = read_lines(path("m.csv"));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NE(lines[0].find("loss"), std::string::npos);
}

TEST_F(CliTest, VerifyReportsAndWritesFiles) {
  const auto o = run({"verify", "comorth", "--d", "8", "--trials", "4", "--out-csv", path("c.csv"),
                      "--out-json", path("c.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  const Json summary = Json::parse(o.out);
  EXPECT_TRUE(summary.at("passed").get<bool>());
  EXPECT_FALSE(summary.contains("per_trial"));
  EXPECT_EQ(read_lines(path("c.csv")).size(), 5u);
  std::ifstream js(path("c.json"));
  EXPECT_EQ(Json::parse(js).at("per_trial").size(), 4u);

  // An impossible certificate level fails the verification, exit code 1.
  const auto fail = run({"verify", "no-joint-sol", "--d", "16", "--trials", "3", "--c-emp", "0.9"});
  EXPECT_EQ(fail.code, cli::kExitFailed) << fail.err;
  EXPECT_EQ(run({"verify", "nope"}).code, cli::kExitValidation);
}

TEST_F(CliTest, ExperimentIsResumable) {
  Json spec = {{"output", path("exp.csv")},
               {"problem", "anv-gaussian"},
               {"trials", 2},
               {"seed", 5},
               {"params", {{"d", 12}, {"budget", 20000}}},
               {"grid", {{"alg", {"zero", "offline-kernel"}}}}};
  {
    std::ofstream s(path("spec.json"));
    s << spec.dump();
  }
  const auto first = run({"experiment", path("spec.json")});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(Json::parse(first.out).at("rows_written"), 4);
  const auto lines = read_lines(path("exp.csv"));
  ASSERT_EQ(lines.size(), 5u);

  const auto second = run({"experiment", path("spec.json")});
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(Json::parse(second.out).at("rows_written"), 0);
  EXPECT_EQ(read_lines(path("exp.csv")), lines);

  // Widening the grid runs only the new cells.
  spec["trials"] = 3;
  std::ostringstream log;
  EXPECT_EQ(cli::run_experiment(spec, log), 2u);
  EXPECT_EQ(read_lines(path("exp.csv")).size(), 7u);
}

TEST_F(CliTest, ExperimentCellMatchesDirectRun) {
  const Json spec = {{"output", path("one.csv")},
                     {"problem", "anv-conditioned"},
                     {"trials", 1},
                     {"seed", 9},
                     {"params", {{"d", 16}, {"alg", "offline-lstsq"}, {"via", "lr"}, {"budget", 20000}}}};
  std::ostringstream log;
  ASSERT_EQ(cli::run_experiment(spec, log), 1u);
  const auto lines = read_lines(path("one.csv"));
  ASSERT_EQ(lines.size(), 2u);

  cli::GenOptions g;
  g.d = 16;
  g.seed = derive_seed(9, 0);
  cli::RunOptions r;
  r.alg = "offline-lstsq";
  r.via = "lr";
  r.budget_bits = 20000;
  r.seed = g.seed;
  const Json direct = cli::run_instance(cli::generate("anv-conditioned", g), r);

  std::vector<std::string> header, row;
  std::stringstream hs(lines[0]), rs(lines[1]);
  for (std::string c; std::getline(hs, c, ',');) header.push_back(c);
  for (std::string c; std::getline(rs, c, ',');) row.push_back(c);
  EXPECT_EQ(header, cli::experiment_columns());
  ASSERT_EQ(row.size(), header.size());
  const auto col = [&](const std::string& name) {
    return row[static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin())];
  };
  EXPECT_EQ(col("status"), "ok");
  EXPECT_EQ(col("loss"), format_double(direct.at("loss").get<double>()));
  EXPECT_EQ(col("peak_state_bits"), direct.at("peak_state_bits").dump());
  EXPECT_EQ(col("seed"), std::to_string(g.seed));
}

TEST_F(CliTest, ExperimentRecordsFailuresAsRows) {
  const Json spec = {{"output", path("fail.csv")},
                     {"problem", "anv-gaussian"},
                     {"params", {{"d", 8}, {"alg", "offline-kernel"}, {"budget", 100}}}};
  std::ostringstream log;
  ASSERT_EQ(cli::run_experiment(spec, log), 1u);
  EXPECT_NE(read_lines(path("fail.csv"))[1].find("budget-violation"), std::string::npos);

  EXPECT_THROW(cli::run_experiment({{"output", path("x.csv")}, {"problem", "lr"}, {"bogus", 1}}, log),
               InvalidArgument);
  EXPECT_THROW(cli::run_experiment({{"output", path("x.csv")},
                                    {"problem", "lr"},
                                    {"params", {{"alg", "zero"}, {"budget", 64}, {"speed", 3}}}},
                                   log),
               InvalidArgument);
}
