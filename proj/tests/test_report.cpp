#include <gtest/gtest.h>

#include <sstream>

#include "pathgauge/error.hpp"
#include "pathgauge/report.hpp"

using namespace pathgauge;
using namespace pathgauge::report;

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(27.4), "27.4");
  EXPECT_EQ(format_number(std::uint64_t{100000}), "100000");
  EXPECT_EQ(format_sig(67.8312), "67.8");
  EXPECT_EQ(format_sig(0.000123456), "0.000123");
}

TEST(TableCsv, SdRoundTrip) {
  ErrorTable t(TableKind::kSdMbps, {{5, 49.3}, {10, 34.7}, {200, 7.2}});
  std::stringstream ss;
  write_table_csv(ss, t);
  EXPECT_EQ(ss.str(), "n,sd_mbps\n5,49.3\n10,34.7\n200,7.2\n");
  auto back = read_table_csv(ss);
  EXPECT_EQ(back.kind(), TableKind::kSdMbps);
  EXPECT_EQ(back.rows(), t.rows());
}

TEST(TableCsv, EtaWithSkippedColumn) {
  ErrorTable t(TableKind::kRelativeErrorPercent, {{5, 82.6}, {10, 61.1}});
  std::vector<std::uint64_t> skipped = {12, 0};
  std::stringstream ss;
  write_table_csv(ss, t, skipped);
  EXPECT_EQ(ss.str(), "n,eta_percent,skipped\n5,82.6,12\n10,61.1,0\n");
  auto back = read_table_csv(ss);
  EXPECT_EQ(back.kind(), TableKind::kRelativeErrorPercent);
  EXPECT_EQ(back.rows(), t.rows());
  std::stringstream bad;
  EXPECT_THROW(write_table_csv(bad, t, std::vector<std::uint64_t>{1}), Error);
}

TEST(TableCsv, MalformedInputNamesTheProblem) {
  for (const char* text : {"", "a,b\n1,2\n", "n,sd_mbps\nx,1\n", "n,sd_mbps\n5\n",
                           "n,sd_mbps\n10,1\n5,2\n"}) {
    std::stringstream ss(text);
    try {
      read_table_csv(ss);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse) << text;
    }
  }
  EXPECT_THROW(read_table_csv_file("/nonexistent/table.csv"), Error);
}

TEST(EstimatesCsv, Layout) {
  std::vector<BandwidthEstimate> est = {{20e6, 0, 2, 4e-4, {}}, {27.4e6, 2, 2, 0, {}}};
  std::stringstream ss;
  write_estimates_csv(ss, est);
  EXPECT_EQ(ss.str(), "window_start,n,mbps\n0,2,20\n2,2,27.4\n");
}

TEST(SimConfigFile, ParsesAllKeys) {
  std::stringstream ss(
      "# ipv4 preset\n"
      "lambda = 2000\n"
      "d_min=0.001\n"
      "true_delta_d = 4e-4\n"
      "delta_w = 16000\n"
      "trials = 500\n"
      "n_values = 5, 10,20\n"
      "seed = 7\n"
      "clock_quantum = 1e-6\n");
  std::vector<std::string> errors;
  auto cfg = parse_sim_config(ss, SimConfig{}, errors);
  EXPECT_TRUE(errors.empty());
  EXPECT_EQ(cfg.lambda_rate, 2000);
  EXPECT_EQ(cfg.d_min, 0.001);
  EXPECT_EQ(cfg.true_delta_d, 4e-4);
  EXPECT_EQ(cfg.delta_w, 16000u);
  EXPECT_EQ(cfg.trials, 500u);
  EXPECT_EQ(cfg.n_values, (std::vector<int>{5, 10, 20}));
  EXPECT_EQ(cfg.rng_seed, 7u);
  EXPECT_EQ(cfg.clock_quantum, 1e-6);
}

TEST(SimConfigFile, ReportsEveryError) {
  std::stringstream ss("lambda = fast\nbogus = 1\nno equals sign\nn_values = 5,x\ntrials = 9\n");
  std::vector<std::string> errors;
  auto cfg = parse_sim_config(ss, SimConfig{}, errors);
  EXPECT_EQ(errors.size(), 4u);
  EXPECT_EQ(cfg.trials, 9u);
  EXPECT_NE(errors[0].find("1"), std::string::npos);  // line number
}

TEST(Lists, Parse) {
  EXPECT_EQ(parse_int_list("5,10, 20"), (std::vector<int>{5, 10, 20}));
  EXPECT_EQ(parse_double_list("1000,2e3"), (std::vector<double>{1000, 2000}));
  EXPECT_THROW(parse_int_list("5,,10"), Error);
  EXPECT_THROW(parse_double_list("abc"), Error);
}

TEST(Json, ConfigEcho) {
  auto j = to_json(SimConfig{});
  EXPECT_EQ(j["lambda"], 1000.0);
  EXPECT_EQ(j["trials"], 100000);
  EXPECT_EQ(j["n_values"].size(), 7u);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
