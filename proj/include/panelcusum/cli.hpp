#ifndef PANELCUSUM_CLI_HPP_
#define PANELCUSUM_CLI_HPP_

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "panelcusum/distribution.hpp"
#include "panelcusum/io.hpp"

namespace panelcusum::cli {

enum ExitCode : int { kSuccess = 0, kDegenerate = 1, kInputError = 2 };

enum class Format { Text, Csv, Json };

inline Format parse_format(const std::string &s) {
  if (s == "text") return Format::Text;
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw InvalidSpec("format must be text, csv or json");
}

// Writes to `path` when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string &path, std::ostream &fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw InvalidSpec("cannot open output file '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream &stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream *out_;
};

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string input = "-";
  std::string test = "tu";
  double alpha = 0.05;
  std::string bandwidth = "t14";
  std::optional<Index> min_seg;
  bool returns = false;
  bool transpose = false;
  bool drop_incomplete = false;
  std::string format = "text";
  std::string out;
  unsigned threads = 1;
};

inline int cmd_detect(const DetectArgs &args, std::ostream &out,
                      std::ostream &err) {
  DetectReport report;
  PanelData panel = validate_panel(Matrix::Zero(1, 3));
  SegmentOptions opt;
  Format format = Format::Text;
  try {
    format = parse_format(args.format);
    if (args.test == "tu") {
      opt.test = TestKind::TU;
    } else if (args.test == "tv") {
      opt.test = TestKind::TV;
    } else {
      throw InvalidSpec("--test must be tu or tv");
    }
    opt.test_options.alpha = args.alpha;
    opt.test_options.rule = parse_bandwidth(args.bandwidth);
    opt.test_options.threads = args.threads;
    opt.min_seg = args.min_seg;

    CsvOptions copt;
    copt.transpose = args.transpose;
    copt.drop_incomplete = args.drop_incomplete;
    CsvPanel csv;
    if (args.input == "-") {
      csv = read_csv_panel(std::cin, copt);
    } else {
      std::ifstream in(args.input, std::ios::binary);
      if (!in) throw InvalidSpec("cannot open input file '" + args.input + "'");
      csv = read_csv_panel(in, copt);
    }
    if (csv.values.rows() == 0) throw EmptyPanel();
    panel = args.returns
                ? log_returns(csv.values, csv.unit_ids, csv.time_ids)
                : validate_panel(std::move(csv.values), csv.unit_ids,
                                 csv.time_ids);
    report.dropped_units = csv.dropped_units;
    report.dropped_ids = csv.dropped_ids;
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kInputError;
  }

  const SegmentationResult seg = [&] {
    try {
      return binary_segment(panel, opt);
    } catch (const OutOfRange &e) {
      err << "error: " << e.kind() << ": " << e.what() << '\n';
      return SegmentationResult{};
    }
  }();
  if (seg.min_seg == 0) return kInputError;

  DetectReport full = make_detect_report(panel, seg, opt);
  full.source = args.input;
  full.returns = args.returns;
  full.transposed = args.transpose;
  full.dropped_units = report.dropped_units;
  full.dropped_ids = report.dropped_ids;

  Sink sink(args.out, out);
  switch (format) {
    case Format::Json:
      sink.stream() << to_json(full).dump(2) << '\n';
      break;
    case Format::Csv:
      write_detect_csv(sink.stream(), full);
      break;
    case Format::Text:
      write_detect_text(sink.stream(), full);
      break;
  }
  if (seg.tree.empty()) {
    err << "note: the panel is shorter than 2 * min_seg = " << 2 * seg.min_seg
        << " periods; nothing was tested\n";
  }
  if (!seg.tree.empty() && !seg.tree.front().error.empty()) {
    err << "error: " << seg.tree.front().error
        << ": the full panel could not be tested\n";
    return kDegenerate;
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// simulate

// (N, T) pairs shared by every table.
inline const std::vector<std::pair<Index, Index>> &table_grid() {
  static const std::vector<std::pair<Index, Index>> grid{
      {100, 500},   {200, 1000},  {300, 2000}, {400, 2000},
      {1000, 4000}, {1500, 4000}, {2000, 4000}};
  return grid;
}

// Cell configurations for "<table>-<row>". Table 1 (size) has 14 rows, each
// yielding a Gaussian and a Gamma cell. Tables 2-5 (power) have 56 rows:
// rho in {2^-h, h^-2} x delta in {U(-.5,.5), U(-.5,1), sparse a, sparse b}
// x the seven (N, T) pairs. Tables 2/3 break at floor(T/2), 4/5 at
// floor(T/3); 2 and 4 use Gaussian errors, 3 and 5 Gamma errors.
//
// Desk scale uses M = 1000 for size cells and M = 200 for power cells;
// paper scale uses M = 1000 throughout.
inline std::vector<SimConfig> table_preset(const std::string &name,
                                           bool paper_scale) {
  const auto dash = name.find('-');
  if (dash == std::string::npos) {
    throw InvalidSpec("table preset must look like <table>-<row>");
  }
  const int table = std::atoi(name.substr(0, dash).c_str());
  const int row = std::atoi(name.substr(dash + 1).c_str());
  const auto &grid = table_grid();
  std::vector<SimConfig> out;
  auto base = [&](RhoRule rho, std::size_t cell) {
    SimConfig c;
    c.spec.units = grid[cell].first;
    c.spec.periods = grid[cell].second;
    c.spec.rho = rho;
    c.rule = rho == RhoRule::GeomHalf ? BandwidthRule::fourth_root()
                                      : BandwidthRule::third_root();
    c.tests = {TestKind::TU, TestKind::TV};
    return c;
  };
  if (table == 1) {
    if (row < 1 || row > 14) throw InvalidSpec("table 1 has rows 1-14");
    const RhoRule rho = row <= 7 ? RhoRule::GeomHalf : RhoRule::InvSquare;
    for (ErrorLaw law : {ErrorLaw::Gaussian, ErrorLaw::StdGamma}) {
      SimConfig c = base(rho, static_cast<std::size_t>((row - 1) % 7));
      c.spec.error = law;
      c.replications = 1000;
      out.push_back(c);
    }
    return out;
  }
  if (table < 2 || table > 5) throw InvalidSpec("tables are numbered 1-5");
  if (row < 1 || row > 56) throw InvalidSpec("tables 2-5 have rows 1-56");
  const RhoRule rho = row <= 28 ? RhoRule::GeomHalf : RhoRule::InvSquare;
  const int block = ((row - 1) % 28) / 7;
  SimConfig c = base(rho, static_cast<std::size_t>((row - 1) % 7));
  c.spec.error = (table == 2 || table == 4) ? ErrorLaw::Gaussian
                                            : ErrorLaw::StdGamma;
  c.spec.t_star = table <= 3 ? c.spec.periods / 2 : c.spec.periods / 3;
  switch (block) {
    case 0: c.spec.delta = delta::NonSparseA{}; break;
    case 1: c.spec.delta = delta::NonSparseB{}; break;
    case 2: c.spec.delta = delta::SparseA{}; break;
    default: c.spec.delta = delta::SparseB{}; break;
  }
  c.replications = paper_scale ? 1000 : 200;
  out.push_back(c);
  return out;
}

inline std::optional<std::uint64_t> env_seed() {
  const char *v = std::getenv("PANELCUSUM_SEED");
  if (!v || !*v) return std::nullopt;
  std::uint64_t seed = 0;
  const std::string_view s(v);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidSpec("PANELCUSUM_SEED must be a non-negative integer");
  }
  return seed;
}

struct SimulateArgs {
  std::string config_file;
  std::string table;
  bool paper_scale = false;
  std::optional<Index> replications;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string format = "csv";
  std::string out;
};

inline void load_config_file(const std::string &path, SimConfig &config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidSpec("cannot open config file '" + path + "'");
  config = parse_sim_config(in);
}

// Seed precedence: explicit flag, then PANELCUSUM_SEED, then the config.
inline void apply_overrides(SimConfig &c, std::optional<Index> replications,
                            std::optional<std::uint64_t> seed,
                            unsigned threads) {
  if (const auto env = env_seed()) c.seed = *env;
  if (seed) c.seed = *seed;
  if (replications) c.replications = *replications;
  c.threads = std::max(1u, threads);
}

inline void write_studies(std::ostream &out, Format format,
                          const std::vector<StudyReport> &reports) {
  switch (format) {
    case Format::Json: {
      nlohmann::ordered_json j;
      j["kind"] = "studies";
      auto arr = nlohmann::ordered_json::array();
      for (const auto &r : reports) arr.push_back(to_json(r));
      j["studies"] = std::move(arr);
      out << j.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      out << kStudyCsvHeader << '\n';
      for (const auto &r : reports) write_study_csv_rows(out, r);
      break;
    case Format::Text:
      for (const auto &r : reports) write_study_text(out, r);
      break;
  }
}

inline int cmd_simulate(const SimulateArgs &args, std::ostream &out,
                        std::ostream &err) {
  std::vector<SimConfig> configs;
  Format format = Format::Csv;
  try {
    format = parse_format(args.format);
    if (args.table.empty() == args.config_file.empty()) {
      throw InvalidSpec("give exactly one of a config file or --table");
    }
    if (!args.table.empty()) {
      configs = table_preset(args.table, args.paper_scale);
    } else {
      configs.emplace_back();
      load_config_file(args.config_file, configs.back());
    }
    for (auto &c : configs) {
      apply_overrides(c, args.replications, args.seed, args.threads);
    }
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kInputError;
  }
  std::vector<StudyReport> reports;
  try {
    for (const auto &c : configs) reports.push_back(run_study(c));
  } catch (const StudyAborted &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kDegenerate;
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kInputError;
  }
  Sink sink(args.out, out);
  write_studies(sink.stream(), format, reports);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// compare

struct Histogram {
  std::string series;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<Index> counts;

  double width() const {
    return (upper - lower) / static_cast<double>(counts.size());
  }
};

// Equal-width bins over [min, max] of the values; the maximum lands in the
// last bin.
inline Histogram make_histogram(std::string series,
                                const std::vector<double> &values,
                                std::size_t bins, std::optional<double> lo = {},
                                std::optional<double> hi = {}) {
  Histogram h;
  h.series = std::move(series);
  h.counts.assign(std::max<std::size_t>(bins, 1), 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lower = lo.value_or(*mn);
  h.upper = hi.value_or(*mx);
  if (!(h.upper > h.lower)) h.upper = h.lower + 1.0;
  const double w = h.width();
  for (double v : values) {
    auto b = static_cast<Index>(std::floor((v - h.lower) / w));
    b = std::clamp<Index>(b, 0, static_cast<Index>(h.counts.size()) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

inline std::vector<Histogram> comparison_histograms(const StudyReport &r,
                                                    std::size_t bins) {
  const TestSummary *tu = r.find(TestKind::TU);
  const TestSummary *tv = r.find(TestKind::TV);
  std::vector<Histogram> out;
  if (!tu || !tv) return out;
  // T_U and T_V share bins so the two distributions overlay directly.
  double lo = 0.0;
  double hi = 0.0;
  if (!tu->statistics.empty()) {
    lo = std::min(*std::min_element(tu->statistics.begin(), tu->statistics.end()),
                  *std::min_element(tv->statistics.begin(), tv->statistics.end()));
    hi = std::max(*std::max_element(tu->statistics.begin(), tu->statistics.end()),
                  *std::max_element(tv->statistics.begin(), tv->statistics.end()));
  }
  out.push_back(make_histogram("TU", tu->statistics, bins, lo, hi));
  out.push_back(make_histogram("TV", tv->statistics, bins, lo, hi));
  std::vector<double> diff(tu->statistics.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = tu->statistics[i] - tv->statistics[i];
  }
  out.push_back(make_histogram("TU_minus_TV", diff, bins));
  return out;
}

inline constexpr std::string_view kHistogramCsvHeader =
    "series,bin,lower,upper,count";

inline void write_histograms_csv(std::ostream &out,
                                 const std::vector<Histogram> &hists) {
  out << kHistogramCsvHeader << '\n';
  for (const auto &h : hists) {
    const double w = h.width();
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << h.series << ',' << b << ','
          << format_double(h.lower + w * static_cast<double>(b)) << ','
          << format_double(h.lower + w * static_cast<double>(b + 1)) << ','
          << h.counts[b] << '\n';
    }
  }
}

struct CompareArgs {
  std::string preset;
  std::string config_file;
  std::optional<Index> replications;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::size_t bins = 30;
  std::string format = "text";
  std::string out;
  std::string hist_out;
};

inline int cmd_compare(const CompareArgs &args, std::ostream &out,
                       std::ostream &err) {
  SimConfig config;
  Format format = Format::Text;
  try {
    format = parse_format(args.format);
    if (args.preset.empty() == args.config_file.empty()) {
      throw InvalidSpec("give exactly one of --preset or a config file");
    }
    if (!args.preset.empty()) {
      if (args.preset != "snr223") {
        throw InvalidSpec("unknown preset '" + args.preset + "'");
      }
      config = snr_design();
    } else {
      load_config_file(args.config_file, config);
    }
    apply_overrides(config, args.replications, args.seed, args.threads);
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kInputError;
  }
  StudyReport report;
  try {
    report = snr_comparison(config);
  } catch (const StudyAborted &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kDegenerate;
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kInputError;
  }
  const std::vector<Histogram> hists = comparison_histograms(report, args.bins);

  Sink sink(args.out, out);
  switch (format) {
    case Format::Json: {
      nlohmann::ordered_json j;
      j["kind"] = "compare";
      j["study"] = to_json(report);
      auto arr = nlohmann::ordered_json::array();
      for (const auto &h : hists) {
        arr.push_back({{"series", h.series},
                       {"lower", h.lower},
                       {"upper", h.upper},
                       {"counts", h.counts}});
      }
      j["histograms"] = std::move(arr);
      sink.stream() << j.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      sink.stream() << kStudyCsvHeader << '\n';
      write_study_csv_rows(sink.stream(), report);
      break;
    case Format::Text:
      write_study_text(sink.stream(), report);
      break;
  }
  if (!args.hist_out.empty()) {
    Sink hs(args.hist_out, out);
    write_histograms_csv(hs.stream(), hists);
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// null-table

struct NullTableArgs {
  std::vector<double> alphas;
  std::string format = "text";
};

inline int cmd_null_table(const NullTableArgs &args, std::ostream &out,
                          std::ostream &err) {
  Format format = Format::Text;
  try {
    format = parse_format(args.format);
    if (args.alphas.empty()) {
      throw InvalidSpec("--alphas needs at least one significance level");
    }
    for (double a : args.alphas) {
      if (!(a > 0.0 && a < 1.0)) {
        throw OutOfRange("significance levels must lie in (0, 1), got " +
                         format_double(a));
      }
    }
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kInputError;
  }
  struct Row {
    double alpha, critical, cdf;
  };
  std::vector<Row> rows;
  for (double a : args.alphas) {
    const double c = bb_sup_critical_value(a);
    rows.push_back({a, c, bb_sup_cdf(c)});
  }
  switch (format) {
    case Format::Json: {
      nlohmann::ordered_json j;
      j["kind"] = "null_table";
      auto arr = nlohmann::ordered_json::array();
      for (const auto &r : rows) {
        arr.push_back({{"alpha", r.alpha},
                       {"critical_value", r.critical},
                       {"cdf_at_critical", r.cdf}});
      }
      j["rows"] = std::move(arr);
      out << j.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      out << "alpha,critical_value,cdf_at_critical\n";
      for (const auto &r : rows) {
        out << format_double(r.alpha) << ',' << format_double(r.critical) << ','
            << format_double(r.cdf) << '\n';
      }
      break;
    case Format::Text: {
      out << "alpha     critical value\n";
      char buf[64];
      for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, "%-9.4g %.6f\n", r.alpha, r.critical);
        out << buf;
      }
      break;
    }
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// generate: write one simulated panel as CSV (fixtures, demos)

struct GenerateArgs {
  std::string config_file;
  std::uint64_t rep = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

inline int cmd_generate(const GenerateArgs &args, std::ostream &out,
                        std::ostream &err) {
  SimConfig config;
  try {
    load_config_file(args.config_file, config);
    apply_overrides(config, std::nullopt, args.seed, 1);
    const GeneratedPanel g = gen_panel(config.spec, args.rep, config.seed);
    Sink sink(args.out, out);
    write_csv_panel(sink.stream(), g.panel);
  } catch (const Error &e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kInputError;
  }
  return kSuccess;
}

}  // namespace panelcusum::cli

#endif  // PANELCUSUM_CLI_HPP_
