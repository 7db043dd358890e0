// End-to-end checks of the command-line tool. The binary path arrives in the
// BICMB_CLI environment variable (set by ctest).

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "bicmb/codebook_io.hpp"

namespace {

std::string cli_path() {
  const char* p = std::getenv("BICMB_CLI");
  return p ? p : "";
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_file =
      ::testing::TempDir() + "cli_out_" + std::to_string(counter++) + ".txt";
  std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::remove(out_file.c_str());
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data rows of a results CSV (comments and header stripped).
std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream is(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::string csv_field(const std::string& row, int index) {
  std::istringstream is(row);
  std::string field;
  for (int i = 0; i <= index; ++i) std::getline(is, field, ',');
  return field;
}

}  // namespace

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_FALSE(cli_path().empty()) << "BICMB_CLI not set";
    dir_ = ::testing::TempDir();
  }
  std::string dir_;
};

TEST_F(CliTest, HelpSucceedsUnknownFlagFails) {
  EXPECT_EQ(run_cli("--help").exit_code, 0);
  EXPECT_EQ(run_cli("simulate --no-such-flag").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);  // missing subcommand
}

TEST_F(CliTest, TrainWritesCodebookAndMonotoneHistory) {
  std::string cb_path = dir_ + "trained_b2.json";
  RunResult r = run_cli("train --bits 2 --train-size 200 --seed 9 --out " + cb_path);
  ASSERT_EQ(r.exit_code, 0) << r.out;

  bicmb::Codebook cb = bicmb::load_codebook(cb_path);
  EXPECT_EQ(cb.size(), 4u);
  EXPECT_EQ(cb.n_tx(), 2);

  std::string hist = slurp(cb_path + ".history.csv");
  ASSERT_FALSE(hist.empty());
  std::istringstream is(hist);
  std::string line;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'i') continue;
    values.push_back(std::stod(line.substr(line.find(',') + 1)));
  }
  ASSERT_GE(values.size(), 2u);
  for (std::size_t i = 1; i < values.size(); ++i)
    EXPECT_LE(values[i], values[i - 1]);

  // Same flags and seed give byte-identical outputs.
  std::string cb2_path = dir_ + "trained_b2_again.json";
  run_cli("train --bits 2 --train-size 200 --seed 9 --out " + cb2_path);
  std::string a = slurp(cb_path), b = slurp(cb2_path);
  // The sidecar embeds the out path, so compare codebook files only.
  EXPECT_EQ(a.substr(0, a.find("\"out\"")), b.substr(0, b.find("\"out\"")));
  bicmb::Codebook cba = bicmb::load_codebook(cb_path);
  bicmb::Codebook cbb = bicmb::load_codebook(cb2_path);
  for (std::size_t i = 0; i < cba.size(); ++i)
    EXPECT_EQ((cba.entry(i) - cbb.entry(i)).norm(), 0.0);
}

TEST_F(CliTest, TrainRefusesTinyTrainingSet) {
  RunResult r = run_cli("train --bits 4 --train-size 100 --out " + dir_ + "x.json");
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, SimulatePerfectReceiversAgreeAndSingleRow) {
  std::string zf_csv = dir_ + "zf.csv";
  std::string mmse_csv = dir_ + "mmse.csv";
  std::string common =
      " --perfect --snr-from 12 --snr-to 12 --snr-step 2 --seed 4 "
      "--min-block-errors 10 --max-info-bits 100000 --out ";
  ASSERT_EQ(run_cli("simulate --receiver zf" + common + zf_csv).exit_code, 0);
  ASSERT_EQ(run_cli("simulate --receiver mmse" + common + mmse_csv).exit_code, 0);

  auto zf_rows = csv_rows(slurp(zf_csv));
  auto mmse_rows = csv_rows(slurp(mmse_csv));
  ASSERT_EQ(zf_rows.size(), 1u);
  ASSERT_EQ(mmse_rows.size(), 1u);
  EXPECT_EQ(csv_field(zf_rows[0], 5), csv_field(mmse_rows[0], 5));  // ber column
  EXPECT_EQ(csv_field(zf_rows[0], 2), csv_field(mmse_rows[0], 2));  // bit errors
}

TEST_F(CliTest, SimulateValidatesFlagCombinations) {
  EXPECT_EQ(run_cli("simulate --perfect --selection sc-oe").exit_code, 2);
  EXPECT_EQ(run_cli("simulate --selection sc-oe").exit_code, 2);  // no codebook
  EXPECT_EQ(run_cli("simulate --codebook missing_file.json --max-info-bits 512")
                .exit_code,
            1);  // file error
  EXPECT_EQ(run_cli("simulate --perfect --receiver zf --snr-from 10 --snr-to 8")
                .exit_code,
            2);
  EXPECT_EQ(run_cli("simulate --rvq-bits 3 --rvq-seed 1 --receiver perfect")
                .exit_code,
            2);  // perfect receiver needs perfect selection
}

TEST_F(CliTest, SimulateConfigBannerRoundTrip) {
  std::string csv1 = dir_ + "first.csv";
  RunResult r = run_cli(
      "simulate --rvq-bits 3 --rvq-seed 5 --receiver svd --snr-from 10 "
      "--snr-to 12 --snr-step 2 --seed 77 --min-block-errors 5 "
      "--max-info-bits 50000 --out " + csv1);
  ASSERT_EQ(r.exit_code, 0) << r.out;

  // First stdout line is the banner JSON; replay it through --config.
  std::string banner = r.out.substr(0, r.out.find('\n'));
  std::string cfg_path = dir_ + "replay.json";
  {
    std::ofstream out(cfg_path);
    out << banner;
  }
  std::string csv2 = dir_ + "second.csv";
  RunResult rr = run_cli("simulate --config " + cfg_path + " --out " + csv2);
  ASSERT_EQ(rr.exit_code, 0) << rr.out;
  EXPECT_EQ(csv_rows(slurp(csv1)), csv_rows(slurp(csv2)));
}

TEST_F(CliTest, DistortionReportTrainedBeatsRandom) {
  std::string cb_path = dir_ + "trained_b3.json";
  ASSERT_EQ(
      run_cli("train --bits 3 --train-size 2000 --seed 21 --out " + cb_path)
          .exit_code,
      0);
  RunResult trained =
      run_cli("distortion-report --codebook " + cb_path + " --eval-size 2000 --seed 5");
  RunResult random = run_cli(
      "distortion-report --rvq-bits 3 --rvq-seed 21 --eval-size 2000 --seed 5");
  ASSERT_EQ(trained.exit_code, 0);
  ASSERT_EQ(random.exit_code, 0);

  auto extract = [](const std::string& text) {
    auto pos = text.find("avg_sc_oe_distortion=");
    return std::stod(text.substr(pos + std::string("avg_sc_oe_distortion=").size()));
  };
  EXPECT_LT(extract(trained.out), extract(random.out));

  RunResult again =
      run_cli("distortion-report --codebook " + cb_path + " --eval-size 2000 --seed 5");
  EXPECT_EQ(trained.out, again.out);
}

TEST_F(CliTest, CompareSingleCellMatchesSimulate) {
  std::string matrix = dir_ + "matrix.json";
  {
    std::ofstream out(matrix);
    out << R"({"n_tx":2,"n_rx":2,"streams":2,
               "snr_db":{"from":10,"to":12,"step":2},
               "min_block_errors":5,"max_info_bits":50000,"seed":77,
               "cells":[{"label":"svd-rvq3","selection":"sc-oe","receiver":"svd",
                         "rvq_bits":3,"rvq_seed":5}]})";
  }
  std::string cmp_csv = dir_ + "cmp.csv";
  RunResult r = run_cli("compare " + matrix + " --out " + cmp_csv);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("pairwise SNR gaps"), std::string::npos);

  std::string sim_csv = dir_ + "sim_ref.csv";
  ASSERT_EQ(run_cli("simulate --rvq-bits 3 --rvq-seed 5 --receiver svd "
                    "--snr-from 10 --snr-to 12 --snr-step 2 --seed 77 "
                    "--min-block-errors 5 --max-info-bits 50000 --out " + sim_csv)
                .exit_code,
            0);

  auto cmp_rows = csv_rows(slurp(cmp_csv));
  auto sim_rows = csv_rows(slurp(sim_csv));
  ASSERT_EQ(cmp_rows.size(), sim_rows.size());
  for (std::size_t i = 0; i < cmp_rows.size(); ++i) {
    // Strip the leading label column.
    std::string stripped = cmp_rows[i].substr(cmp_rows[i].find(',') + 1);
    EXPECT_EQ(stripped, sim_rows[i]);
  }

  EXPECT_EQ(run_cli("compare " + dir_ + "no_such_matrix.json").exit_code, 2);
}
