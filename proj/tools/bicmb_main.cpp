// Command-line front end: codebook training, simulation sweeps, paired
// comparisons, and distortion reports. Every run prints an effective-config
// banner (all defaults expanded, seed included) that fully reproduces it;
// `simulate --config` accepts the banner JSON back.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bicmb/bicmb.hpp"

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, bicmb::Selection> kSelectionNames = {
    {"sc-e", bicmb::Selection::kScE},
    {"sc-oe", bicmb::Selection::kScOe},
    {"lambda-min", bicmb::Selection::kLambdaMin},
    {"perfect", bicmb::Selection::kPerfect},
    {"fixed-rotation", bicmb::Selection::kFixedRotation}};

const std::map<std::string, bicmb::Receiver> kReceiverNames = {
    {"zf", bicmb::Receiver::kZf},
    {"mmse", bicmb::Receiver::kMmse},
    {"svd", bicmb::Receiver::kSvd},
    {"perfect", bicmb::Receiver::kPerfect}};

std::string name_of(bicmb::Selection s) {
  for (const auto& [k, v] : kSelectionNames)
    if (v == s) return k;
  return "?";
}

std::string name_of(bicmb::Receiver r) {
  for (const auto& [k, v] : kReceiverNames)
    if (v == r) return k;
  return "?";
}

std::vector<double> make_grid(double from, double to, double step) {
  if (step <= 0.0) throw UsageError("snr step must be positive");
  if (to < from) throw UsageError("snr range is empty");
  std::vector<double> grid;
  for (double s = from; s <= to + 1e-9; s += step) grid.push_back(s);
  return grid;
}

void print_banner(const ordered_json& j) {
  std::cout << j.dump() << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  int n_tx = 2, n_rx = 2, streams = 2, bits = 0;
  std::size_t train_size = 10000;
  double epsilon = 1e-3;
  int max_iter = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int run_train(const TrainArgs& a) {
  const std::size_t entries = std::size_t{1} << a.bits;
  if (a.train_size < 10 * entries)
    throw UsageError("train-size must be at least 10 * 2^bits");

  ordered_json banner{{"tool", "bicmb"},
                      {"version", BICMB_VERSION},
                      {"subcommand", "train"},
                      {"n_tx", a.n_tx},
                      {"n_rx", a.n_rx},
                      {"streams", a.streams},
                      {"bits", a.bits},
                      {"train_size", a.train_size},
                      {"epsilon", a.epsilon},
                      {"max_iter", a.max_iter},
                      {"seed", a.seed},
                      {"out", a.out}};
  print_banner(banner);

  bicmb::TrainingSet ts =
      bicmb::training_set(a.train_size, a.n_rx, a.n_tx, a.streams, a.seed);
  auto [cb, report] = bicmb::lloyd_train(ts, a.bits, a.epsilon, a.max_iter, a.seed);
  bicmb::save_codebook(cb, a.out, &banner);

  // Held-out evaluation on a fresh set drawn from a derived seed.
  bicmb::TrainingSet eval = bicmb::training_set(
      10000, a.n_rx, a.n_tx, a.streams, bicmb::derive_stream(a.seed, 0xE7A1));
  double held_out = bicmb::average_distortion(cb, eval.items);

  std::ofstream hist(a.out + ".history.csv");
  if (!hist) throw bicmb::io_error("cannot write history sidecar");
  hist << "# bicmb " << BICMB_VERSION << " train\n";
  hist << "# config: " << banner.dump() << "\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.12g", held_out);
  hist << "# held_out_avg_sc_oe_distortion: " << buf << " (eval_size=10000)\n";
  hist << "iteration,avg_sc_oe_distortion\n";
  for (std::size_t i = 0; i < report.distortion_history.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", i, report.distortion_history[i]);
    hist << buf;
  }

  std::printf("converged=%s iterations=%d final_distortion=%.6g held_out=%.6g\n",
              report.converged ? "true" : "false", report.iterations,
              report.distortion_history.back(), held_out);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config_path;
  std::string codebook_path;
  bool perfect = false;
  std::uint64_t rvq_seed = 0;
  int rvq_bits = 0;
  std::string selection;
  std::string receiver;
  std::string rotation;
  int n_tx = 2, n_rx = 2, streams = 2;
  double snr_from = 6.0, snr_to = 22.0, snr_step = 2.0;
  int info_bits = 512, depth = 8;
  std::uint64_t min_block_errors = 200, min_bit_errors = 0, min_info_bits = 0,
                max_info_bits = 20'000'000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "results.csv";
};

struct ResolvedSim {
  bicmb::SimConfig cfg;
  std::string source;  // perfect | codebook | rvq
  std::string out;
};

ordered_json sim_banner(const ResolvedSim& r) {
  ordered_json j{{"tool", "bicmb"},
                 {"version", BICMB_VERSION},
                 {"subcommand", "simulate"},
                 {"n_tx", r.cfg.n_tx},
                 {"n_rx", r.cfg.n_rx},
                 {"streams", r.cfg.streams},
                 {"source", r.source}};
  if (r.source == "codebook") j["codebook"] = r.cfg.codebook_path;
  if (r.source == "rvq") {
    j["rvq_bits"] = r.cfg.rvq_bits;
    j["rvq_seed"] = *r.cfg.rvq_seed;
  }
  j["selection"] = name_of(r.cfg.selection);
  j["receiver"] = name_of(r.cfg.receiver);
  j["rotation"] =
      r.cfg.rotation_name.empty() ? ordered_json(nullptr) : ordered_json(r.cfg.rotation_name);
  j["snr_db"] = r.cfg.snr_db;
  j["info_bits_per_block"] = r.cfg.info_bits_per_block;
  j["interleaver_depth"] = r.cfg.interleaver_depth;
  j["min_block_errors"] = r.cfg.stop.min_block_errors;
  j["min_bit_errors"] = r.cfg.stop.min_bit_errors;
  j["min_info_bits"] = r.cfg.stop.min_info_bits;
  j["max_info_bits"] = r.cfg.stop.max_info_bits;
  j["seed"] = r.cfg.master_seed;
  j["workers"] = r.cfg.workers;
  j["out"] = r.out;
  return j;
}

// Applies a banner-schema JSON file over the flag defaults.
void apply_config_file(SimulateArgs& a, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config file: ") + e.what());
  }
  std::string source = j.value("source", "");
  if (source == "perfect") a.perfect = true;
  if (source == "codebook") a.codebook_path = j.value("codebook", "");
  if (source == "rvq") {
    a.rvq_bits = j.value("rvq_bits", 0);
    a.rvq_seed = j.value("rvq_seed", std::uint64_t{0});
  }
  if (j.contains("selection")) a.selection = j["selection"].get<std::string>();
  if (j.contains("receiver")) a.receiver = j["receiver"].get<std::string>();
  if (j.contains("rotation") && !j["rotation"].is_null())
    a.rotation = j["rotation"].get<std::string>();
  a.n_tx = j.value("n_tx", a.n_tx);
  a.n_rx = j.value("n_rx", a.n_rx);
  a.streams = j.value("streams", a.streams);
  a.info_bits = j.value("info_bits_per_block", a.info_bits);
  a.depth = j.value("interleaver_depth", a.depth);
  a.min_block_errors = j.value("min_block_errors", a.min_block_errors);
  a.min_bit_errors = j.value("min_bit_errors", a.min_bit_errors);
  a.min_info_bits = j.value("min_info_bits", a.min_info_bits);
  a.max_info_bits = j.value("max_info_bits", a.max_info_bits);
  a.seed = j.value("seed", a.seed);
  a.workers = j.value("workers", a.workers);
  a.out = j.value("out", a.out);
  if (j.contains("snr_db")) {
    auto grid = j["snr_db"].get<std::vector<double>>();
    if (!grid.empty()) {
      a.snr_from = grid.front();
      a.snr_to = grid.back();
      a.snr_step = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
    }
  }
}

ResolvedSim resolve_simulate(const SimulateArgs& a,
                             const std::vector<double>& explicit_grid) {
  ResolvedSim r;
  int sources = (a.perfect ? 1 : 0) + (a.codebook_path.empty() ? 0 : 1) +
                (a.rvq_bits > 0 ? 1 : 0);
  if (sources > 1)
    throw UsageError("choose one of --perfect, --codebook, --rvq-bits/--rvq-seed");

  r.cfg.n_tx = a.n_tx;
  r.cfg.n_rx = a.n_rx;
  r.cfg.streams = a.streams;
  r.cfg.info_bits_per_block = a.info_bits;
  r.cfg.interleaver_depth = a.depth;
  r.cfg.stop = {a.min_block_errors, a.min_bit_errors, a.min_info_bits,
                a.max_info_bits};
  r.cfg.master_seed = a.seed;
  r.cfg.workers = a.workers;
  r.cfg.snr_db = explicit_grid.empty()
                     ? make_grid(a.snr_from, a.snr_to, a.snr_step)
                     : explicit_grid;
  r.out = a.out;

  if (!a.codebook_path.empty()) {
    r.source = "codebook";
    r.cfg.codebook = bicmb::load_codebook(a.codebook_path);
    r.cfg.codebook_path = a.codebook_path;
  } else if (a.rvq_bits > 0) {
    r.source = "rvq";
    r.cfg.codebook = bicmb::random_codebook(a.n_tx, a.streams, a.rvq_bits, a.rvq_seed);
    r.cfg.rvq_bits = a.rvq_bits;
    r.cfg.rvq_seed = a.rvq_seed;
  } else {
    r.source = "perfect";
  }

  if (!a.rotation.empty()) {
    if (a.rotation != "dft") throw UsageError("only --rotation dft is supported");
    if (r.source != "perfect")
      throw UsageError("--rotation applies to the perfect-CSIT source only");
    if (a.streams != 2) throw UsageError("--rotation dft needs 2 streams");
    r.cfg.rotation = bicmb::dft2();
    r.cfg.rotation_name = "dft";
  }

  // Selection: explicit flag, else derived from the source.
  if (!a.selection.empty()) {
    auto it = kSelectionNames.find(a.selection);
    if (it == kSelectionNames.end())
      throw UsageError("unknown selection " + a.selection);
    r.cfg.selection = it->second;
  } else if (!a.rotation.empty()) {
    r.cfg.selection = bicmb::Selection::kFixedRotation;
  } else if (r.source == "perfect") {
    r.cfg.selection = bicmb::Selection::kPerfect;
  } else {
    r.cfg.selection = bicmb::Selection::kScOe;
  }
  if (r.cfg.selection == bicmb::Selection::kFixedRotation && !r.cfg.rotation)
    throw UsageError("fixed-rotation selection needs --rotation dft");
  if (!a.rotation.empty() && r.cfg.selection != bicmb::Selection::kFixedRotation)
    throw UsageError("--rotation conflicts with the requested selection");

  bool needs_cb = r.cfg.selection == bicmb::Selection::kScE ||
                  r.cfg.selection == bicmb::Selection::kScOe ||
                  r.cfg.selection == bicmb::Selection::kLambdaMin;
  if (needs_cb && r.source == "perfect")
    throw UsageError("selection " + name_of(r.cfg.selection) +
                     " needs --codebook or --rvq-bits/--rvq-seed");
  if (!needs_cb && r.source != "perfect")
    throw UsageError("selection " + name_of(r.cfg.selection) +
                     " does not use a codebook");

  // Receiver: explicit flag, else the default pairing.
  if (!a.receiver.empty()) {
    auto it = kReceiverNames.find(a.receiver);
    if (it == kReceiverNames.end()) throw UsageError("unknown receiver " + a.receiver);
    r.cfg.receiver = it->second;
  } else if (r.cfg.selection == bicmb::Selection::kPerfect) {
    r.cfg.receiver = bicmb::Receiver::kPerfect;
  } else if (r.cfg.selection == bicmb::Selection::kFixedRotation) {
    r.cfg.receiver = bicmb::Receiver::kZf;
  } else {
    r.cfg.receiver = bicmb::Receiver::kSvd;
  }

  try {
    r.cfg.validate();
  } catch (const bicmb::parameter_error& e) {
    throw UsageError(e.what());
  }
  return r;
}

int run_simulate(const ResolvedSim& r) {
  ordered_json banner = sim_banner(r);
  print_banner(banner);
  std::vector<bicmb::BerPoint> points = bicmb::run_sweep(r.cfg);
  std::vector<std::string> comments{std::string("bicmb ") + BICMB_VERSION +
                                        " simulate",
                                    "config: " + banner.dump()};
  if (r.out == "-") {
    bicmb::write_ber_csv(std::cout, points, comments);
  } else {
    std::ofstream out(r.out);
    if (!out) throw bicmb::io_error("cannot write " + r.out);
    bicmb::write_ber_csv(out, points, comments);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareCell {
  std::string label;
  bicmb::SimConfig cfg;
};

int run_compare(const std::string& matrix_path, const std::string& out_path,
                int workers_override) {
  std::ifstream in(matrix_path);
  if (!in) throw UsageError("cannot open " + matrix_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config matrix: ") + e.what());
  }
  if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty())
    throw UsageError("config matrix needs a non-empty cells array");

  bicmb::SimConfig shared;
  shared.n_tx = j.value("n_tx", 2);
  shared.n_rx = j.value("n_rx", 2);
  shared.streams = j.value("streams", 2);
  shared.info_bits_per_block = j.value("info_bits_per_block", 512);
  shared.interleaver_depth = j.value("interleaver_depth", 8);
  shared.stop.min_block_errors = j.value("min_block_errors", std::uint64_t{200});
  shared.stop.min_bit_errors = j.value("min_bit_errors", std::uint64_t{0});
  shared.stop.min_info_bits = j.value("min_info_bits", std::uint64_t{0});
  shared.stop.max_info_bits = j.value("max_info_bits", std::uint64_t{20'000'000});
  shared.master_seed = j.value("seed", std::uint64_t{1});
  shared.workers = workers_override > 0 ? workers_override : j.value("workers", 1);
  if (j.contains("snr_db") && j["snr_db"].is_array())
    shared.snr_db = j["snr_db"].get<std::vector<double>>();
  else if (j.contains("snr_db") && j["snr_db"].is_object())
    shared.snr_db = make_grid(j["snr_db"].value("from", 6.0),
                              j["snr_db"].value("to", 22.0),
                              j["snr_db"].value("step", 2.0));
  else
    throw UsageError("config matrix needs snr_db (array or {from,to,step})");

  std::vector<CompareCell> cells;
  for (const auto& cj : j["cells"]) {
    CompareCell cell;
    cell.cfg = shared;
    cell.label = cj.value("label", "");
    if (cell.label.empty()) throw UsageError("every cell needs a label");
    for (const auto& other : cells)
      if (other.label == cell.label)
        throw UsageError("duplicate cell label " + cell.label);

    std::string sel = cj.value("selection", "");
    std::string rcv = cj.value("receiver", "");
    if (cj.contains("codebook")) {
      cell.cfg.codebook = bicmb::load_codebook(cj["codebook"].get<std::string>());
      cell.cfg.codebook_path = cj["codebook"].get<std::string>();
      if (sel.empty()) sel = "sc-oe";
    } else if (cj.contains("rvq_bits")) {
      int bits = cj["rvq_bits"].get<int>();
      std::uint64_t rseed = cj.value("rvq_seed", std::uint64_t{0});
      cell.cfg.codebook =
          bicmb::random_codebook(shared.n_tx, shared.streams, bits, rseed);
      cell.cfg.rvq_bits = bits;
      cell.cfg.rvq_seed = rseed;
      if (sel.empty()) sel = "sc-oe";
    } else {
      if (sel.empty()) sel = "perfect";
    }
    if (cj.value("rotation", "") == "dft") {
      cell.cfg.rotation = bicmb::dft2();
      cell.cfg.rotation_name = "dft";
      if (sel.empty() || sel == "perfect") sel = "fixed-rotation";
    }
    auto sit = kSelectionNames.find(sel);
    if (sit == kSelectionNames.end()) throw UsageError("unknown selection " + sel);
    cell.cfg.selection = sit->second;
    if (rcv.empty())
      rcv = cell.cfg.selection == bicmb::Selection::kPerfect ? "perfect" : "mmse";
    auto rit = kReceiverNames.find(rcv);
    if (rit == kReceiverNames.end()) throw UsageError("unknown receiver " + rcv);
    cell.cfg.receiver = rit->second;
    try {
      cell.cfg.validate();
    } catch (const bicmb::parameter_error& e) {
      throw UsageError(std::string(e.what()) + " (cell " + cell.label + ")");
    }
    cells.push_back(std::move(cell));
  }

  ordered_json banner{{"tool", "bicmb"},
                      {"version", BICMB_VERSION},
                      {"subcommand", "compare"},
                      {"matrix", matrix_path},
                      {"n_tx", shared.n_tx},
                      {"n_rx", shared.n_rx},
                      {"streams", shared.streams},
                      {"snr_db", shared.snr_db},
                      {"seed", shared.master_seed},
                      {"workers", shared.workers},
                      {"out", out_path}};
  {
    auto labels = ordered_json::array();
    for (const auto& c : cells) labels.push_back(c.label);
    banner["cells"] = labels;
  }
  print_banner(banner);

  std::ofstream out(out_path);
  if (!out) throw bicmb::io_error("cannot write " + out_path);
  out << "# bicmb " << BICMB_VERSION << " compare\n";
  out << "# config: " << banner.dump() << "\n";
  out << "label,snr_db,info_bits,bit_errors,blocks,block_errors,ber,fer,"
         "discarded_blocks\n";

  std::vector<std::pair<std::string, std::vector<bicmb::BerPoint>>> curves;
  for (const auto& cell : cells) {
    std::vector<bicmb::BerPoint> pts = bicmb::run_sweep(cell.cfg);
    char line[300];
    for (const auto& p : pts) {
      std::snprintf(line, sizeof(line), "%s,%g,%llu,%llu,%llu,%llu,%.8e,%.8e,%llu\n",
                    cell.label.c_str(), p.snr_db,
                    static_cast<unsigned long long>(p.info_bits),
                    static_cast<unsigned long long>(p.bit_errors),
                    static_cast<unsigned long long>(p.blocks),
                    static_cast<unsigned long long>(p.block_errors), p.ber, p.fer,
                    static_cast<unsigned long long>(p.discarded_blocks));
      out << line;
    }
    curves.emplace_back(cell.label, std::move(pts));
  }

  std::ostringstream summary;
  summary << "pairwise SNR gaps at BER 1e-3 (log-linear interpolation)\n";
  for (const auto& [label, pts] : curves) {
    double x = bicmb::snr_at_ber(pts, 1e-3, shared.stop.min_block_errors);
    summary << "  " << label << " crosses 1e-3 at ";
    if (std::isnan(x))
      summary << "n/a";
    else
      summary << x << " dB";
    summary << "\n";
  }
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t k = i + 1; k < curves.size(); ++k) {
      double a = bicmb::snr_at_ber(curves[i].second, 1e-3,
                                   shared.stop.min_block_errors);
      double b = bicmb::snr_at_ber(curves[k].second, 1e-3,
                                   shared.stop.min_block_errors);
      summary << "  gap " << curves[k].first << " - " << curves[i].first << ": ";
      if (std::isnan(a) || std::isnan(b))
        summary << "n/a";
      else
        summary << (b - a) << " dB";
      summary << "\n";
    }
  std::cout << summary.str();
  std::ofstream sfile(out_path + ".summary.txt");
  sfile << "# config: " << banner.dump() << "\n" << summary.str();
  return 0;
}

// ---------------------------------------------------------------------------
// distortion-report

struct ReportArgs {
  std::string codebook_path;
  int rvq_bits = 0;
  std::uint64_t rvq_seed = 0;
  int n_tx = 2, streams = 2, n_rx = 0;
  std::size_t eval_size = 10000;
  std::uint64_t seed = 1;
};

int run_report(const ReportArgs& a) {
  std::optional<bicmb::Codebook> cb;
  if (!a.codebook_path.empty()) {
    cb = bicmb::load_codebook(a.codebook_path);
  } else if (a.rvq_bits > 0) {
    cb = bicmb::random_codebook(a.n_tx, a.streams, a.rvq_bits, a.rvq_seed);
  } else {
    throw UsageError("need --codebook or --rvq-bits/--rvq-seed");
  }
  int n_rx = a.n_rx > 0 ? a.n_rx : cb->n_tx();

  ordered_json banner{{"tool", "bicmb"},
                      {"version", BICMB_VERSION},
                      {"subcommand", "distortion-report"},
                      {"codebook", a.codebook_path},
                      {"rvq_bits", a.rvq_bits},
                      {"rvq_seed", a.rvq_seed},
                      {"n_tx", cb->n_tx()},
                      {"n_rx", n_rx},
                      {"streams", cb->n_streams()},
                      {"bits", cb->bits()},
                      {"eval_size", a.eval_size},
                      {"seed", a.seed}};
  print_banner(banner);

  bicmb::TrainingSet eval = bicmb::training_set(a.eval_size, n_rx, cb->n_tx(),
                                                cb->n_streams(), a.seed);
  double oe = bicmb::average_distortion(*cb, eval.items);
  double e = 0.0;
  for (const auto& v : eval.items) e += bicmb::select_sc_e(v, *cb).distortion;
  e /= static_cast<double>(eval.count());
  std::printf("avg_sc_oe_distortion=%.12g\n", oe);
  std::printf("avg_sc_e_distortion=%.12g\n", e);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"limited-feedback beamforming link simulator and codebook toolkit"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Lloyd-train a codebook");
  train_cmd->add_option("--n-tx", train.n_tx, "transmit antennas");
  train_cmd->add_option("--n-rx", train.n_rx, "receive antennas");
  train_cmd->add_option("--streams", train.streams, "spatial streams");
  train_cmd->add_option("--bits", train.bits, "feedback bits")->required();
  train_cmd->add_option("--train-size", train.train_size, "training items");
  train_cmd->add_option("--epsilon", train.epsilon, "relative-improvement stop");
  train_cmd->add_option("--max-iter", train.max_iter, "iteration cap");
  train_cmd->add_option("--seed", train.seed, "rng seed");
  train_cmd->add_option("--out", train.out, "codebook output path")->required();

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run one BER sweep");
  sim_cmd->add_option("--config", sim.config_path, "effective-config JSON file");
  sim_cmd->add_option("--codebook", sim.codebook_path, "codebook JSON path");
  sim_cmd->add_flag("--perfect", sim.perfect, "perfect CSIT source");
  sim_cmd->add_option("--rvq-bits", sim.rvq_bits, "random codebook bits");
  sim_cmd->add_option("--rvq-seed", sim.rvq_seed, "random codebook seed");
  sim_cmd->add_option("--selection", sim.selection,
                      "sc-e | sc-oe | lambda-min | perfect | fixed-rotation");
  sim_cmd->add_option("--receiver", sim.receiver, "zf | mmse | svd | perfect");
  sim_cmd->add_option("--rotation", sim.rotation, "dft (fixed-rotation mode)");
  sim_cmd->add_option("--n-tx", sim.n_tx, "transmit antennas");
  sim_cmd->add_option("--n-rx", sim.n_rx, "receive antennas");
  sim_cmd->add_option("--streams", sim.streams, "spatial streams");
  sim_cmd->add_option("--snr-from", sim.snr_from, "first SNR (dB)");
  sim_cmd->add_option("--snr-to", sim.snr_to, "last SNR (dB)");
  sim_cmd->add_option("--snr-step", sim.snr_step, "SNR step (dB)");
  sim_cmd->add_option("--info-bits", sim.info_bits, "info bits per fading block");
  sim_cmd->add_option("--depth", sim.depth, "interleaver depth (symbols)");
  sim_cmd->add_option("--min-block-errors", sim.min_block_errors, "stop rule");
  sim_cmd->add_option("--min-bit-errors", sim.min_bit_errors, "stop rule");
  sim_cmd->add_option("--min-info-bits", sim.min_info_bits, "stop rule");
  sim_cmd->add_option("--max-info-bits", sim.max_info_bits, "stop rule cap");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--workers", sim.workers, "worker threads");
  sim_cmd->add_option("--out", sim.out, "results CSV path ('-' for stdout)");

  std::string matrix_path, compare_out = "compare.csv";
  int compare_workers = 0;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "run a config matrix");
  cmp_cmd->add_option("matrix", matrix_path, "config matrix JSON")->required();
  cmp_cmd->add_option("--out", compare_out, "combined CSV path");
  cmp_cmd->add_option("--workers", compare_workers, "override worker threads");

  ReportArgs rep;
  CLI::App* rep_cmd =
      app.add_subcommand("distortion-report", "average distortion of a codebook");
  rep_cmd->add_option("--codebook", rep.codebook_path, "codebook JSON path");
  rep_cmd->add_option("--rvq-bits", rep.rvq_bits, "random codebook bits");
  rep_cmd->add_option("--rvq-seed", rep.rvq_seed, "random codebook seed");
  rep_cmd->add_option("--n-tx", rep.n_tx, "transmit antennas (rvq)");
  rep_cmd->add_option("--streams", rep.streams, "spatial streams (rvq)");
  rep_cmd->add_option("--n-rx", rep.n_rx, "receive antennas for evaluation");
  rep_cmd->add_option("--eval-size", rep.eval_size, "evaluation items");
  rep_cmd->add_option("--seed", rep.seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*sim_cmd) {
      if (sim_cmd->count("--rvq-seed") && !sim_cmd->count("--rvq-bits"))
        throw UsageError("--rvq-seed needs --rvq-bits");
      if (!sim.config_path.empty()) {
        // Config file fills defaults; explicit flags then override.
        SimulateArgs from_file = sim;
        apply_config_file(from_file, sim.config_path);
        auto keep = [&](const char* flag) { return sim_cmd->count(flag) > 0; };
        if (keep("--codebook")) from_file.codebook_path = sim.codebook_path;
        if (keep("--perfect")) from_file.perfect = sim.perfect;
        if (keep("--rvq-bits")) from_file.rvq_bits = sim.rvq_bits;
        if (keep("--rvq-seed")) from_file.rvq_seed = sim.rvq_seed;
        if (keep("--selection")) from_file.selection = sim.selection;
        if (keep("--receiver")) from_file.receiver = sim.receiver;
        if (keep("--rotation")) from_file.rotation = sim.rotation;
        if (keep("--n-tx")) from_file.n_tx = sim.n_tx;
        if (keep("--n-rx")) from_file.n_rx = sim.n_rx;
        if (keep("--streams")) from_file.streams = sim.streams;
        if (keep("--info-bits")) from_file.info_bits = sim.info_bits;
        if (keep("--depth")) from_file.depth = sim.depth;
        if (keep("--min-block-errors"))
          from_file.min_block_errors = sim.min_block_errors;
        if (keep("--min-bit-errors")) from_file.min_bit_errors = sim.min_bit_errors;
        if (keep("--min-info-bits")) from_file.min_info_bits = sim.min_info_bits;
        if (keep("--max-info-bits")) from_file.max_info_bits = sim.max_info_bits;
        if (keep("--seed")) from_file.seed = sim.seed;
        if (keep("--workers")) from_file.workers = sim.workers;
        if (keep("--out")) from_file.out = sim.out;
        std::vector<double> grid;
        if (!keep("--snr-from") && !keep("--snr-to") && !keep("--snr-step")) {
          std::ifstream in(sim.config_path);
          nlohmann::json j;
          in >> j;
          if (j.contains("snr_db") && j["snr_db"].is_array())
            grid = j["snr_db"].get<std::vector<double>>();
        } else {
          if (keep("--snr-from")) from_file.snr_from = sim.snr_from;
          if (keep("--snr-to")) from_file.snr_to = sim.snr_to;
          if (keep("--snr-step")) from_file.snr_step = sim.snr_step;
        }
        return run_simulate(resolve_simulate(from_file, grid));
      }
      return run_simulate(resolve_simulate(sim, {}));
    }
    if (*cmp_cmd) return run_compare(matrix_path, compare_out, compare_workers);
    if (*rep_cmd) return run_report(rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
