#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "smdeim/bench/config.hpp"
#include "smdeim/bench/csv.hpp"
#include "smdeim/bench/experiment.hpp"

using namespace smdeim;
using namespace smdeim::bench;

namespace {

const char* kSmall = R"(# tiny campaign
model = burgers
burgers.n = 31, 41
burgers.nt = 41
rom.k = 6
rom.m = 4, 8
rom.strategies = tensorial, direct_projection, deim, smdeim, mdeim
seed = 7
)";

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("smdeim_bench_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::vector<std::string> body_lines(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    // Keep only the deterministic leading columns.
    std::size_t pos = 0;
    for (std::size_t c = 0; c < kDeterministicColumns && pos != std::string::npos; ++c)
      pos = line.find(',', pos + (c ? 1 : 0));
    out.push_back(line.substr(0, pos));
  }
  return out;
}

ExperimentConfig small_config(const std::filesystem::path& out) {
  auto c = parse_config(kSmall);
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.model, "burgers");
  EXPECT_EQ(c.burgers_n, std::vector<std::size_t>{201});
  EXPECT_EQ(c.strategies.size(), 6u);
  EXPECT_DOUBLE_EQ(c.h, 0.01);
  EXPECT_FALSE(c.centered);
  EXPECT_EQ(c.newton.max_iterations, 50u);
}

TEST(Config, ParsesListsAndComments) {
  const auto c = parse_config(kSmall);
  EXPECT_EQ(c.burgers_n, (std::vector<std::size_t>{31, 41}));
  EXPECT_EQ(c.m, (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(c.strategies.size(), 5u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.size_label(1), "burgers_n41");
}

TEST(Config, SweGrid) {
  const auto c = parse_config("model = swe\nswe.grid = 21x15, 9x7\n");
  ASSERT_EQ(c.swe_grid.size(), 2u);
  EXPECT_EQ(c.swe_grid[1].nx, 9u);
  EXPECT_EQ(c.size_label(0), "swe_21x15");
}

TEST(Config, EmptyStrategyListRejected) {
  EXPECT_THROW(parse_config("rom.strategies =\n"), ConfigError);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("seed = 1\nseed = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("burgers.mu = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("rom.k = -3\n"), ConfigError);
  EXPECT_THROW(parse_config("just a line\n"), ConfigError);
  EXPECT_THROW(parse_config("model = heat\n"), ConfigError);
  EXPECT_THROW(parse_config("rom.strategies = tensorial, qr\n"), ConfigError);
  EXPECT_THROW(parse_config("pod.gamma = 1.5\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent.cfg"), ConfigError);
}

TEST(Csv, HeaderAndNaFields) {
  ResultRow r;
  r.run_hash = 0xabc;
  r.model = "burgers";
  r.n = 199;
  r.nt = 401;
  r.strategy = "full";
  r.mean_newton_iterations = 4.5;
  const auto line = format_row(r);
  std::size_t commas = std::count(line.begin(), line.end(), ',');
  const std::string header = csv_header();
  EXPECT_EQ(commas, static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')));
  EXPECT_EQ(line.substr(0, 20), "1,0000000000000abc,b");
  EXPECT_NE(line.find(",NA,NA,"), std::string::npos);
}

TEST(Csv, SeventeenDigits) {
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(fmt17(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, HeaderMismatchRejected) {
  const auto dir = fresh_dir("hdr");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "results.csv") << "a,b,c\n";
  EXPECT_THROW(ResultsFile(dir / "results.csv"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, SweepIsDeterministicAndResumable) {
  const auto a = fresh_dir("a"), b = fresh_dir("b");
  Experiment ea(small_config(a)), eb(small_config(b));
  ASSERT_EQ(ea.run(Experiment::Command::Sweep), 0);
  ASSERT_EQ(eb.run(Experiment::Command::Sweep), 0);
  const auto la = body_lines(ea.results_path()), lb = body_lines(eb.results_path());
  EXPECT_EQ(la, lb);
  // 2 sizes × (full + tensorial + direct_projection + 3 hyper strategies × 2 m).
  EXPECT_EQ(la.size(), 2u * (1 + 2 + 3 * 2));
  // Re-running appends nothing.
  ASSERT_EQ(ea.run(Experiment::Command::Sweep), 0);
  EXPECT_EQ(body_lines(ea.results_path()).size(), la.size());
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Experiment, SplitCommandsReproduceSweepRows) {
  const auto a = fresh_dir("sweep"), b = fresh_dir("split");
  Experiment ea(small_config(a)), eb(small_config(b));
  ASSERT_EQ(ea.run(Experiment::Command::Sweep), 0);
  ASSERT_EQ(eb.run(Experiment::Command::Simulate), 0);
  ASSERT_EQ(eb.run(Experiment::Command::Offline), 0);
  ASSERT_EQ(eb.run(Experiment::Command::Online), 0);
  const auto la = body_lines(ea.results_path()), lb = body_lines(eb.results_path());
  EXPECT_EQ(std::multiset<std::string>(la.begin(), la.end()), std::multiset<std::string>(lb.begin(), lb.end()));
  EXPECT_TRUE(std::filesystem::exists(eb.artifact_path(0)));
  EXPECT_TRUE(std::filesystem::exists(eb.plot_path(0, "spectrum")));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Experiment, OnlineWithoutOfflineFails) {
  const auto dir = fresh_dir("missing");
  Experiment e(small_config(dir));
  EXPECT_NE(e.run(Experiment::Command::Online), 0);
  ASSERT_EQ(e.run(Experiment::Command::Simulate), 0);
  EXPECT_NE(e.run(Experiment::Command::Online), 0);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, JobsDoNotChangeRows) {
  const auto a = fresh_dir("j1"), b = fresh_dir("j2");
  auto ca = small_config(a), cb = small_config(b);
  cb.jobs = 2;
  ASSERT_EQ(Experiment(ca).run(Experiment::Command::Sweep), 0);
  ASSERT_EQ(Experiment(cb).run(Experiment::Command::Sweep), 0);
  EXPECT_EQ(body_lines(a / "results.csv"), body_lines(b / "results.csv"));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
