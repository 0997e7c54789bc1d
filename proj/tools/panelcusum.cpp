// panelcusum: variance change-point detection for panel data.
//
//   panelcusum detect prices.csv --returns --transpose --bandwidth t13
//   panelcusum simulate --table 2-3 --format json
//   panelcusum compare --preset snr223 --hist-out hist.csv
//   panelcusum null-table --alphas 0.10,0.05,0.01

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "panelcusum/cli.hpp"

namespace {

std::vector<double> split_alphas(const std::string &list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  namespace pc = panelcusum::cli;
  CLI::App app{"Variance change-point detection in panel data"};
  app.require_subcommand(1);

  pc::DetectArgs detect;
  long long min_seg = 0;
  auto *d = app.add_subcommand("detect", "Detect variance change-points in a CSV panel");
  d->add_option("input", detect.input, "CSV file (rows = panels, columns = time; '-' for stdin)")
      ->required();
  d->add_option("--test", detect.test, "tu or tv")->check(CLI::IsMember({"tu", "tv"}));
  d->add_option("--alpha", detect.alpha, "Significance level per split");
  d->add_option("--bandwidth", detect.bandwidth, "t14, t13 or fixed:<h>");
  d->add_option("--min-seg", min_seg, "Minimum segment length (default max(20, 2h+2))");
  d->add_flag("--returns", detect.returns, "Input holds prices; use log returns");
  d->add_flag("--transpose", detect.transpose, "Input rows are time points");
  d->add_flag("--drop-incomplete", detect.drop_incomplete,
              "Drop panels with missing values instead of failing");
  d->add_option("--format", detect.format, "text, csv or json");
  d->add_option("--out", detect.out, "Write the report to a file");
  d->add_option("--threads", detect.threads, "Worker threads");

  pc::SimulateArgs sim;
  long long sim_m = 0;
  std::uint64_t sim_seed = 0;
  auto *s = app.add_subcommand("simulate", "Run a Monte Carlo size/power study");
  s->add_option("config", sim.config_file, "SimConfig file (key = value lines)");
  s->add_option("--table", sim.table, "Table preset <table>-<row>, e.g. 1-1 or 2-15");
  s->add_flag("--paper-scale", sim.paper_scale, "Use M = 1000 for every preset cell");
  auto *sim_m_opt = s->add_option("--M", sim_m, "Replications");
  auto *sim_seed_opt = s->add_option("--seed", sim_seed, "Base seed");
  s->add_option("--threads", sim.threads, "Worker threads (results do not change)");
  s->add_option("--format", sim.format, "csv, json or text");
  s->add_option("--out", sim.out, "Write the report to a file");

  pc::CompareArgs cmp;
  long long cmp_m = 0;
  std::uint64_t cmp_seed = 0;
  auto *c = app.add_subcommand("compare", "SNR and P(TU > TV) under a sparse alternative");
  c->add_option("config", cmp.config_file, "SimConfig file");
  c->add_option("--preset", cmp.preset, "snr223");
  auto *cmp_m_opt = c->add_option("--M", cmp_m, "Replications");
  auto *cmp_seed_opt = c->add_option("--seed", cmp_seed, "Base seed");
  c->add_option("--threads", cmp.threads, "Worker threads");
  c->add_option("--bins", cmp.bins, "Histogram bins");
  c->add_option("--format", cmp.format, "text, csv or json");
  c->add_option("--out", cmp.out, "Write the report to a file");
  c->add_option("--hist-out", cmp.hist_out, "Write histogram bin counts (CSV)");

  std::string alphas;
  std::string null_format = "text";
  auto *n = app.add_subcommand("null-table", "Critical values of sup|B0|");
  n->add_option("--alphas", alphas, "Comma-separated significance levels")->required();
  n->add_option("--format", null_format, "text, csv or json");

  pc::GenerateArgs gen;
  std::uint64_t gen_seed = 0;
  auto *g = app.add_subcommand("generate", "Write one simulated panel as CSV");
  g->add_option("config", gen.config_file, "SimConfig file")->required();
  g->add_option("--rep", gen.rep, "Replication index");
  auto *gen_seed_opt = g->add_option("--seed", gen_seed, "Base seed");
  g->add_option("--out", gen.out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pc::kInputError;
  }

  if (d->parsed()) {
    if (min_seg > 0) detect.min_seg = min_seg;
    return pc::cmd_detect(detect, std::cout, std::cerr);
  }
  if (s->parsed()) {
    if (*sim_m_opt) sim.replications = sim_m;
    if (*sim_seed_opt) sim.seed = sim_seed;
    return pc::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (c->parsed()) {
    if (*cmp_m_opt) cmp.replications = cmp_m;
    if (*cmp_seed_opt) cmp.seed = cmp_seed;
    return pc::cmd_compare(cmp, std::cout, std::cerr);
  }
  if (n->parsed()) {
    pc::NullTableArgs args;
    args.format = null_format;
    try {
      args.alphas = split_alphas(alphas);
    } catch (const std::exception &) {
      std::cerr << "error: --alphas must be a comma-separated list of numbers\n";
      return pc::kInputError;
    }
    return pc::cmd_null_table(args, std::cout, std::cerr);
  }
  if (g->parsed()) {
    if (*gen_seed_opt) gen.seed = gen_seed;
    return pc::cmd_generate(gen, std::cout, std::cerr);
  }
  return pc::kInputError;
}
