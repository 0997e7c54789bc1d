#ifndef PANELCUSUM_IO_HPP_
#define PANELCUSUM_IO_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "panelcusum/segmentation.hpp"
#include "panelcusum/simulate.hpp"

namespace panelcusum {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string &what)
      : Error("ParseError", "line " + std::to_string(line) +
                                (column ? ", column " + std::to_string(column)
                                        : std::string()) +
                                ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// ---------------------------------------------------------------------------
// Number formatting

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// CSV panels

struct CsvOptions {
  bool transpose = false;         // file rows are time points, not panels
  bool drop_incomplete = false;   // drop panels with missing cells
};

struct CsvPanel {
  Matrix values;
  std::vector<std::string> unit_ids;
  std::vector<std::string> time_ids;
  Index dropped_units = 0;
  std::vector<std::string> dropped_ids;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      cur.push_back(ch);
    } else if (ch == ',' && !quoted) {
      cells.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.emplace_back(trim(cur));
  return cells;
}

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

inline bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" ||
         s == "null" || s == "NULL";
}

}  // namespace detail

// Comma-separated numeric matrix. A first row containing non-numeric cells
// (outside the label column) is a header of time labels; a first column with
// non-numeric cells is a column of unit labels. Missing cells (empty, NA, NaN)
// are errors unless drop_incomplete is set.
inline CsvPanel read_csv_panel(std::istream &in, const CsvOptions &opt = {}) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_csv_line(line));
    line_numbers.push_back(lineno);
  }
  if (rows.empty()) {
    throw ParseError(lineno, 0, "no data rows");
  }
  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw ParseError(line_numbers[r], 0,
                       "expected " + std::to_string(width) + " fields, found " +
                           std::to_string(rows[r].size()));
    }
  }
  auto non_numeric = [](const std::string &cell) {
    return !detail::is_missing_token(cell) &&
           !detail::parse_number(cell).has_value();
  };
  bool has_header = false;
  for (std::size_t c = 1; c < width; ++c) {
    if (non_numeric(rows[0][c])) has_header = true;
  }
  if (width == 1 && non_numeric(rows[0][0])) has_header = true;
  const std::size_t first_data = has_header ? 1 : 0;
  bool has_labels = false;
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    if (non_numeric(rows[r][0])) has_labels = true;
  }
  const std::size_t first_col = has_labels ? 1 : 0;
  if (first_data >= rows.size() || first_col >= width) {
    throw ParseError(lineno, 0, "no numeric cells");
  }

  const std::size_t nrow = rows.size() - first_data;
  const std::size_t ncol = width - first_col;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  if (has_labels) {
    for (std::size_t r = first_data; r < rows.size(); ++r) {
      row_labels.push_back(rows[r][0]);
    }
  }
  if (has_header) {
    for (std::size_t c = first_col; c < width; ++c) {
      col_labels.push_back(rows[0][c]);
    }
  }

  Matrix grid(static_cast<Index>(nrow), static_cast<Index>(ncol));
  std::vector<std::vector<char>> missing(nrow, std::vector<char>(ncol, 0));
  for (std::size_t r = 0; r < nrow; ++r) {
    for (std::size_t c = 0; c < ncol; ++c) {
      const std::string &cell = rows[r + first_data][c + first_col];
      if (detail::is_missing_token(cell)) {
        missing[r][c] = 1;
        grid(static_cast<Index>(r), static_cast<Index>(c)) = 0.0;
        continue;
      }
      const auto v = detail::parse_number(cell);
      if (!v) {
        throw ParseError(line_numbers[r + first_data], c + first_col + 1,
                         "not a number: '" + cell + "'");
      }
      if (!std::isfinite(*v)) {
        throw ParseError(line_numbers[r + first_data], c + first_col + 1,
                         "non-finite value '" + cell + "'");
      }
      grid(static_cast<Index>(r), static_cast<Index>(c)) = *v;
    }
  }

  // Orient as panels x time.
  const std::size_t units = opt.transpose ? ncol : nrow;
  const std::size_t periods = opt.transpose ? nrow : ncol;
  auto is_missing = [&](std::size_t u, std::size_t t) {
    return opt.transpose ? missing[t][u] != 0 : missing[u][t] != 0;
  };
  auto source_line = [&](std::size_t u, std::size_t t) {
    return line_numbers[(opt.transpose ? t : u) + first_data];
  };
  auto source_col = [&](std::size_t u, std::size_t t) {
    return (opt.transpose ? u : t) + first_col + 1;
  };
  std::vector<std::string> &unit_src = opt.transpose ? col_labels : row_labels;
  std::vector<std::string> &time_src = opt.transpose ? row_labels : col_labels;

  CsvPanel out;
  std::vector<std::size_t> keep;
  for (std::size_t u = 0; u < units; ++u) {
    bool complete = true;
    for (std::size_t t = 0; t < periods && complete; ++t) {
      if (is_missing(u, t)) {
        if (!opt.drop_incomplete) {
          throw ParseError(source_line(u, t), source_col(u, t),
                           "missing value");
        }
        complete = false;
      }
    }
    if (complete) {
      keep.push_back(u);
    } else {
      ++out.dropped_units;
      out.dropped_ids.push_back(unit_src.empty() ? std::to_string(u)
                                                 : unit_src[u]);
    }
  }
  out.values.resize(static_cast<Index>(keep.size()),
                    static_cast<Index>(periods));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    for (std::size_t t = 0; t < periods; ++t) {
      const std::size_t u = keep[k];
      out.values(static_cast<Index>(k), static_cast<Index>(t)) =
          opt.transpose ? grid(static_cast<Index>(t), static_cast<Index>(u))
                        : grid(static_cast<Index>(u), static_cast<Index>(t));
    }
    if (!unit_src.empty()) out.unit_ids.push_back(unit_src[keep[k]]);
  }
  out.time_ids = time_src;
  return out;
}

inline void write_csv_panel(std::ostream &out, const PanelData &panel) {
  const bool labels = !panel.unit_ids().empty();
  if (!panel.time_ids().empty()) {
    if (labels) out << "unit";
    for (std::size_t t = 0; t < panel.time_ids().size(); ++t) {
      if (labels || t > 0) out << ',';
      out << panel.time_ids()[t];
    }
    out << '\n';
  }
  for (Index i = 0; i < panel.units(); ++i) {
    if (labels) out << panel.unit_ids()[static_cast<std::size_t>(i)];
    for (Index t = 0; t < panel.periods(); ++t) {
      if (labels || t > 0) out << ',';
      out << format_double(panel.values()(i, t));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Enumerations as text

inline std::string bandwidth_to_string(BandwidthRule rule) {
  switch (rule.kind) {
    case BandwidthRule::Kind::FourthRoot:
      return "t14";
    case BandwidthRule::Kind::ThirdRoot:
      return "t13";
    case BandwidthRule::Kind::Fixed:
      return "fixed:" + std::to_string(rule.lag);
  }
  return "t14";
}

inline BandwidthRule parse_bandwidth(std::string_view s) {
  if (s == "t14") return BandwidthRule::fourth_root();
  if (s == "t13") return BandwidthRule::third_root();
  if (s.starts_with("fixed:")) {
    const auto v = detail::parse_number(s.substr(6));
    if (v && *v >= 1 && *v == std::floor(*v)) {
      return BandwidthRule::fixed(static_cast<Index>(*v));
    }
  }
  throw InvalidSpec("bandwidth must be t14, t13 or fixed:<h>, got '" +
                    std::string(s) + "'");
}

inline std::string rho_to_string(RhoRule r) {
  switch (r) {
    case RhoRule::White: return "white";
    case RhoRule::GeomHalf: return "geom_half";
    case RhoRule::InvSquare: return "inv_square";
  }
  return "white";
}

inline std::string error_to_string(ErrorLaw e) {
  return e == ErrorLaw::Gaussian ? "gaussian" : "gamma";
}

inline std::string delta_to_string(const DeltaScheme &d) {
  return std::visit(
      [](const auto &s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, delta::None>) return "none";
        if constexpr (std::is_same_v<S, delta::NonSparseA>) return "nonsparse_a";
        if constexpr (std::is_same_v<S, delta::NonSparseB>) return "nonsparse_b";
        if constexpr (std::is_same_v<S, delta::SparseA>) return "sparse_a";
        if constexpr (std::is_same_v<S, delta::SparseB>) return "sparse_b";
        if constexpr (std::is_same_v<S, delta::FixedUniform>) {
          return "fixed:" + format_double(s.delta) + ":" + std::to_string(s.m);
        }
        if constexpr (std::is_same_v<S, delta::Custom>) {
          std::string out = "custom:";
          for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (i) out += ';';
            out += format_double(s.values[i]);
          }
          return out;
        }
      },
      d);
}

inline std::string tests_to_string(const std::vector<TestKind> &tests) {
  std::string out;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (i) out += ',';
    out += tests[i] == TestKind::TU ? "tu" : "tv";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SimConfig text format: one `key = value` per line, `#` starts a comment.
//
//   N = 100            T = 500           t_star = none|half|third|<k>
//   rho = white|geom_half|inv_square     error = gaussian|gamma
//   mu = uniform01|zero                  sigma = uniform12|one
//   delta = none|nonsparse_a|nonsparse_b|sparse_a|sparse_b
//           |fixed:<delta>:<m>|custom:<d1>;<d2>;...
//   M = 1000   seed = 1   tests = tu,tv   alpha = 0.05
//   bandwidth = t14|t13|fixed:<h>        normalizer = longrun|simple
//   accuracy_window_frac = 0.05          threads = 1

inline SimConfig parse_sim_config(std::istream &in) {
  SimConfig c;
  std::string t_star = "none";
  bool bandwidth_set = false;
  std::string line;
  std::size_t lineno = 0;
  auto integer = [&](std::string_view v, std::size_t ln) -> Index {
    const auto d = detail::parse_number(v);
    if (!d || *d != std::floor(*d)) {
      throw ParseError(ln, 0, "expected an integer, got '" + std::string(v) + "'");
    }
    return static_cast<Index>(*d);
  };
  auto real = [&](std::string_view v, std::size_t ln) -> double {
    const auto d = detail::parse_number(v);
    if (!d) throw ParseError(ln, 0, "expected a number, got '" + std::string(v) + "'");
    return *d;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(lineno, 0, "expected key = value");
    }
    const std::string key(detail::trim(s.substr(0, eq)));
    const std::string value(detail::trim(s.substr(eq + 1)));
    try {
      if (key == "N") {
        c.spec.units = integer(value, lineno);
      } else if (key == "T") {
        c.spec.periods = integer(value, lineno);
      } else if (key == "t_star") {
        t_star = value;
      } else if (key == "rho") {
        if (value == "white") c.spec.rho = RhoRule::White;
        else if (value == "geom_half") c.spec.rho = RhoRule::GeomHalf;
        else if (value == "inv_square") c.spec.rho = RhoRule::InvSquare;
        else throw ParseError(lineno, 0, "unknown rho '" + value + "'");
      } else if (key == "error") {
        if (value == "gaussian") c.spec.error = ErrorLaw::Gaussian;
        else if (value == "gamma") c.spec.error = ErrorLaw::StdGamma;
        else throw ParseError(lineno, 0, "unknown error law '" + value + "'");
      } else if (key == "mu") {
        if (value == "uniform01") c.spec.mu = MuLaw::Uniform01;
        else if (value == "zero") c.spec.mu = MuLaw::Zero;
        else throw ParseError(lineno, 0, "unknown mu law '" + value + "'");
      } else if (key == "sigma") {
        if (value == "uniform12") c.spec.sigma = SigmaLaw::Uniform12;
        else if (value == "one") c.spec.sigma = SigmaLaw::One;
        else throw ParseError(lineno, 0, "unknown sigma law '" + value + "'");
      } else if (key == "delta") {
        if (value == "none") c.spec.delta = delta::None{};
        else if (value == "nonsparse_a") c.spec.delta = delta::NonSparseA{};
        else if (value == "nonsparse_b") c.spec.delta = delta::NonSparseB{};
        else if (value == "sparse_a") c.spec.delta = delta::SparseA{};
        else if (value == "sparse_b") c.spec.delta = delta::SparseB{};
        else if (value.starts_with("fixed:")) {
          const std::string rest = value.substr(6);
          const auto colon = rest.find(':');
          if (colon == std::string::npos) {
            throw ParseError(lineno, 0, "fixed delta needs fixed:<delta>:<m>");
          }
          c.spec.delta = delta::FixedUniform{real(rest.substr(0, colon), lineno),
                                             integer(rest.substr(colon + 1), lineno)};
        } else if (value.starts_with("custom:")) {
          delta::Custom custom;
          std::string_view rest = std::string_view(value).substr(7);
          while (!rest.empty()) {
            const auto sep = rest.find(';');
            custom.values.push_back(real(detail::trim(rest.substr(0, sep)), lineno));
            if (sep == std::string_view::npos) break;
            rest = rest.substr(sep + 1);
          }
          c.spec.delta = std::move(custom);
        } else {
          throw ParseError(lineno, 0, "unknown delta scheme '" + value + "'");
        }
      } else if (key == "M") {
        c.replications = integer(value, lineno);
      } else if (key == "seed") {
        const auto d = detail::parse_number(value);
        std::uint64_t seed = 0;
        const auto res =
            std::from_chars(value.data(), value.data() + value.size(), seed);
        if (!d || res.ec != std::errc() || res.ptr != value.data() + value.size()) {
          throw ParseError(lineno, 0, "seed must be a non-negative integer");
        }
        c.seed = seed;
      } else if (key == "tests") {
        c.tests.clear();
        std::string_view rest = value;
        while (!rest.empty()) {
          const auto sep = rest.find(',');
          const auto name = detail::trim(rest.substr(0, sep));
          if (name == "tu") c.tests.push_back(TestKind::TU);
          else if (name == "tv") c.tests.push_back(TestKind::TV);
          else throw ParseError(lineno, 0, "unknown test '" + std::string(name) + "'");
          if (sep == std::string_view::npos) break;
          rest = rest.substr(sep + 1);
        }
      } else if (key == "alpha") {
        c.alpha = real(value, lineno);
      } else if (key == "bandwidth") {
        c.rule = parse_bandwidth(value);
        bandwidth_set = true;
      } else if (key == "normalizer") {
        if (value == "longrun") c.normalizer = Normalizer::LongRun;
        else if (value == "simple") c.normalizer = Normalizer::SimpleVariance;
        else throw ParseError(lineno, 0, "unknown normalizer '" + value + "'");
      } else if (key == "accuracy_window_frac") {
        c.accuracy_window_frac = real(value, lineno);
      } else if (key == "threads") {
        c.threads = static_cast<unsigned>(std::max<Index>(1, integer(value, lineno)));
      } else {
        throw ParseError(lineno, 0, "unknown key '" + key + "'");
      }
    } catch (const InvalidSpec &e) {
      throw ParseError(lineno, 0, e.what());
    }
  }
  if (t_star == "none") {
    c.spec.t_star.reset();
  } else if (t_star == "half") {
    c.spec.t_star = c.spec.periods / 2;
  } else if (t_star == "third") {
    c.spec.t_star = c.spec.periods / 3;
  } else {
    c.spec.t_star = integer(t_star, 0);
  }
  if (!bandwidth_set && c.spec.rho == RhoRule::InvSquare) {
    c.rule = BandwidthRule::third_root();
  }
  validate_spec(c.spec);
  return c;
}

inline std::string sim_config_to_text(const SimConfig &c) {
  std::ostringstream out;
  out << "N = " << c.spec.units << '\n'
      << "T = " << c.spec.periods << '\n'
      << "t_star = "
      << (c.spec.t_star ? std::to_string(*c.spec.t_star) : std::string("none"))
      << '\n'
      << "rho = " << rho_to_string(c.spec.rho) << '\n'
      << "error = " << error_to_string(c.spec.error) << '\n'
      << "mu = " << (c.spec.mu == MuLaw::Zero ? "zero" : "uniform01") << '\n'
      << "sigma = " << (c.spec.sigma == SigmaLaw::One ? "one" : "uniform12")
      << '\n'
      << "delta = " << delta_to_string(c.spec.delta) << '\n'
      << "M = " << c.replications << '\n'
      << "seed = " << c.seed << '\n'
      << "tests = " << tests_to_string(c.tests) << '\n'
      << "alpha = " << format_double(c.alpha) << '\n'
      << "bandwidth = " << bandwidth_to_string(c.rule) << '\n'
      << "normalizer = " << to_string(c.normalizer) << '\n'
      << "accuracy_window_frac = " << format_double(c.accuracy_window_frac)
      << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Detection report

struct DetectSegment {
  Index start = 0;  // 0-based global column, inclusive
  Index end = 0;    // exclusive
  Index depth = 0;
  std::optional<double> statistic;
  std::optional<double> p_value;
  std::optional<Index> k_hat;  // global
  std::optional<bool> reject;
  std::optional<Index> bandwidth;
  std::optional<Index> change_point;
  std::optional<std::string> label;
  std::optional<std::string> error;

  bool operator==(const DetectSegment &) const = default;
};

struct DetectChangePoint {
  Index index = 0;  // number of periods before the break
  std::optional<std::string> label;  // time label of the last pre-break period

  bool operator==(const DetectChangePoint &) const = default;
};

struct DetectReport {
  std::string source;
  Index units = 0;
  Index periods = 0;
  Index dropped_units = 0;
  std::vector<std::string> dropped_ids;
  bool returns = false;
  bool transposed = false;
  std::string test = "TU";
  double alpha = 0.05;
  std::string bandwidth = "t14";
  Index min_seg = 0;
  std::vector<DetectChangePoint> change_points;
  std::vector<DetectSegment> segments;

  bool operator==(const DetectReport &) const = default;
};

inline DetectReport make_detect_report(const PanelData &panel,
                                       const SegmentationResult &seg,
                                       const SegmentOptions &opt) {
  DetectReport r;
  r.units = panel.units();
  r.periods = panel.periods();
  r.test = std::string(to_string(opt.test));
  r.alpha = opt.test_options.alpha;
  r.bandwidth = bandwidth_to_string(opt.test_options.rule);
  r.min_seg = seg.min_seg;
  auto label_at = [&](Index cp) -> std::optional<std::string> {
    if (panel.time_ids().empty()) return std::nullopt;
    return panel.time_ids()[static_cast<std::size_t>(cp - 1)];
  };
  for (Index cp : seg.change_points) {
    r.change_points.push_back({cp, label_at(cp)});
  }
  for (const SegmentRecord &rec : seg.tree) {
    DetectSegment s;
    s.start = rec.start;
    s.end = rec.end;
    s.depth = rec.depth;
    if (rec.result) {
      s.statistic = rec.result->statistic;
      s.p_value = rec.result->p_value;
      s.k_hat = rec.start + rec.result->k_hat;
      s.reject = rec.result->reject;
      s.bandwidth = rec.result->bandwidth;
    }
    if (rec.change_point) {
      s.change_point = rec.change_point;
      s.label = label_at(*rec.change_point);
    }
    if (!rec.error.empty()) s.error = rec.error;
    r.segments.push_back(std::move(s));
  }
  return r;
}

namespace detail {

template <typename T>
void put_optional(nlohmann::ordered_json &j, const char *key,
                  const std::optional<T> &v) {
  j[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const nlohmann::json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const DetectReport &r) {
  nlohmann::ordered_json j;
  j["kind"] = "detect";
  j["input"] = {{"source", r.source},
                {"units", r.units},
                {"periods", r.periods},
                {"dropped_units", r.dropped_units},
                {"dropped_ids", r.dropped_ids},
                {"returns", r.returns},
                {"transposed", r.transposed}};
  j["test"] = r.test;
  j["alpha"] = r.alpha;
  j["bandwidth"] = r.bandwidth;
  j["min_seg"] = r.min_seg;
  auto cps = nlohmann::ordered_json::array();
  for (const auto &cp : r.change_points) {
    nlohmann::ordered_json c;
    c["index"] = cp.index;
    detail::put_optional(c, "label", cp.label);
    cps.push_back(std::move(c));
  }
  j["change_points"] = std::move(cps);
  auto segs = nlohmann::ordered_json::array();
  for (const auto &s : r.segments) {
    nlohmann::ordered_json o;
    o["start"] = s.start;
    o["end"] = s.end;
    o["depth"] = s.depth;
    detail::put_optional(o, "statistic", s.statistic);
    detail::put_optional(o, "p_value", s.p_value);
    detail::put_optional(o, "k_hat", s.k_hat);
    detail::put_optional(o, "reject", s.reject);
    detail::put_optional(o, "bandwidth", s.bandwidth);
    detail::put_optional(o, "change_point", s.change_point);
    detail::put_optional(o, "label", s.label);
    detail::put_optional(o, "error", s.error);
    segs.push_back(std::move(o));
  }
  j["segments"] = std::move(segs);
  return j;
}

inline DetectReport detect_report_from_json(const nlohmann::json &j) {
  DetectReport r;
  const auto &in = j.at("input");
  r.source = in.at("source").get<std::string>();
  r.units = in.at("units").get<Index>();
  r.periods = in.at("periods").get<Index>();
  r.dropped_units = in.at("dropped_units").get<Index>();
  r.dropped_ids = in.at("dropped_ids").get<std::vector<std::string>>();
  r.returns = in.at("returns").get<bool>();
  r.transposed = in.at("transposed").get<bool>();
  r.test = j.at("test").get<std::string>();
  r.alpha = j.at("alpha").get<double>();
  r.bandwidth = j.at("bandwidth").get<std::string>();
  r.min_seg = j.at("min_seg").get<Index>();
  for (const auto &c : j.at("change_points")) {
    r.change_points.push_back(
        {c.at("index").get<Index>(), detail::get_optional<std::string>(c, "label")});
  }
  for (const auto &o : j.at("segments")) {
    DetectSegment s;
    s.start = o.at("start").get<Index>();
    s.end = o.at("end").get<Index>();
    s.depth = o.at("depth").get<Index>();
    s.statistic = detail::get_optional<double>(o, "statistic");
    s.p_value = detail::get_optional<double>(o, "p_value");
    s.k_hat = detail::get_optional<Index>(o, "k_hat");
    s.reject = detail::get_optional<bool>(o, "reject");
    s.bandwidth = detail::get_optional<Index>(o, "bandwidth");
    s.change_point = detail::get_optional<Index>(o, "change_point");
    s.label = detail::get_optional<std::string>(o, "label");
    s.error = detail::get_optional<std::string>(o, "error");
    r.segments.push_back(std::move(s));
  }
  return r;
}

inline constexpr std::string_view kDetectCsvHeader =
    "start,end,depth,statistic,p_value,k_hat,reject,bandwidth,change_point,"
    "label,error";

inline void write_detect_csv(std::ostream &out, const DetectReport &r) {
  out << kDetectCsvHeader << '\n';
  auto opt_num = [](const auto &v) -> std::string {
    if (!v) return "";
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>) {
      return format_double(*v);
    } else {
      return std::to_string(*v);
    }
  };
  for (const auto &s : r.segments) {
    out << s.start << ',' << s.end << ',' << s.depth << ','
        << opt_num(s.statistic) << ',' << opt_num(s.p_value) << ','
        << opt_num(s.k_hat) << ','
        << (s.reject ? (*s.reject ? "true" : "false") : "") << ','
        << opt_num(s.bandwidth) << ',' << opt_num(s.change_point) << ','
        << s.label.value_or("") << ',' << s.error.value_or("") << '\n';
  }
}

inline void write_detect_text(std::ostream &out, const DetectReport &r) {
  out << "input: " << (r.source.empty() ? "-" : r.source) << "  N=" << r.units
      << "  T=" << r.periods << "  dropped=" << r.dropped_units
      << (r.returns ? "  (log returns)" : "") << '\n';
  out << "test: " << r.test << "  alpha=" << format_double(r.alpha)
      << "  bandwidth=" << r.bandwidth << "  min_seg=" << r.min_seg << '\n';
  out << "change points: " << r.change_points.size() << '\n';
  for (const auto &cp : r.change_points) {
    out << "  " << cp.index;
    if (cp.label) out << "  " << *cp.label;
    out << '\n';
  }
  out << "segments:\n";
  for (const auto &s : r.segments) {
    out << "  [" << s.start << ", " << s.end << ")  depth " << s.depth;
    if (s.error) {
      out << "  error " << *s.error << '\n';
      continue;
    }
    out << "  stat " << format_double(*s.statistic) << "  p "
        << format_double(*s.p_value) << "  h " << *s.bandwidth
        << (*s.reject ? "  reject" : "  accept");
    if (s.change_point) out << "  split at " << *s.change_point;
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Study report

inline nlohmann::ordered_json to_json(const SimConfig &c) {
  nlohmann::ordered_json j;
  j["N"] = c.spec.units;
  j["T"] = c.spec.periods;
  j["t_star"] = c.spec.t_star ? nlohmann::ordered_json(*c.spec.t_star)
                              : nlohmann::ordered_json(nullptr);
  j["rho"] = rho_to_string(c.spec.rho);
  j["error"] = error_to_string(c.spec.error);
  j["mu"] = c.spec.mu == MuLaw::Zero ? "zero" : "uniform01";
  j["sigma"] = c.spec.sigma == SigmaLaw::One ? "one" : "uniform12";
  j["delta"] = delta_to_string(c.spec.delta);
  j["M"] = c.replications;
  j["seed"] = c.seed;
  j["tests"] = tests_to_string(c.tests);
  j["alpha"] = c.alpha;
  j["bandwidth"] = bandwidth_to_string(c.rule);
  j["normalizer"] = std::string(to_string(c.normalizer));
  j["accuracy_window"] = c.accuracy_window();
  return j;
}

inline nlohmann::ordered_json to_json(const StudyReport &r) {
  nlohmann::ordered_json j;
  j["kind"] = "study";
  j["config"] = to_json(r.config);
  j["completed"] = r.completed;
  j["failures"] = r.failures;
  j["noise_repaired"] = r.noise_repaired;
  auto tests = nlohmann::ordered_json::array();
  for (const auto &s : r.summaries) {
    nlohmann::ordered_json t;
    t["test"] = std::string(to_string(s.test));
    t["rejection_rate"] = s.rejection_rate;
    detail::put_optional(t, "accuracy", s.accuracy);
    t["mean_statistic"] = s.mean_statistic;
    detail::put_optional(t, "sd_statistic", s.sd_statistic);
    detail::put_optional(t, "snr", s.snr);
    t["floored_panels"] = s.floored_panels;
    tests.push_back(std::move(t));
  }
  j["tests"] = std::move(tests);
  detail::put_optional(j, "dominance_prob", r.dominance_prob);
  return j;
}

inline constexpr std::string_view kStudyCsvHeader =
    "test,N,T,t_star,rho,error,delta,M,seed,alpha,bandwidth,normalizer,"
    "rejection_rate,accuracy,mean_statistic,sd_statistic,snr,dominance_prob,"
    "failures";

inline void write_study_csv_rows(std::ostream &out, const StudyReport &r) {
  const SimConfig &c = r.config;
  auto opt = [](const std::optional<double> &v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto &s : r.summaries) {
    out << to_string(s.test) << ',' << c.spec.units << ',' << c.spec.periods
        << ',' << (c.spec.t_star ? std::to_string(*c.spec.t_star) : "") << ','
        << rho_to_string(c.spec.rho) << ',' << error_to_string(c.spec.error)
        << ',' << delta_to_string(c.spec.delta) << ',' << c.replications << ','
        << c.seed << ',' << format_double(c.alpha) << ','
        << bandwidth_to_string(c.rule) << ',' << to_string(c.normalizer) << ','
        << format_double(s.rejection_rate) << ',' << opt(s.accuracy) << ','
        << format_double(s.mean_statistic) << ',' << opt(s.sd_statistic) << ','
        << opt(s.snr) << ',' << opt(r.dominance_prob) << ',' << r.failures
        << '\n';
  }
}

inline void write_study_text(std::ostream &out, const StudyReport &r) {
  const SimConfig &c = r.config;
  out << "N=" << c.spec.units << " T=" << c.spec.periods << " t*="
      << (c.spec.t_star ? std::to_string(*c.spec.t_star) : "none")
      << " rho=" << rho_to_string(c.spec.rho)
      << " error=" << error_to_string(c.spec.error)
      << " delta=" << delta_to_string(c.spec.delta) << " M=" << c.replications
      << " seed=" << c.seed << '\n';
  for (const auto &s : r.summaries) {
    out << "  " << to_string(s.test) << "  rate " << format_double(s.rejection_rate);
    if (s.accuracy) out << "  accuracy " << format_double(*s.accuracy);
    out << "  mean " << format_double(s.mean_statistic);
    if (s.sd_statistic) out << "  sd " << format_double(*s.sd_statistic);
    if (s.snr) out << "  snr " << format_double(*s.snr);
    out << '\n';
  }
  if (r.dominance_prob) {
    out << "  P(TU > TV) " << format_double(*r.dominance_prob) << '\n';
  }
  if (r.failures) out << "  failed replications " << r.failures << '\n';
}

}  // namespace panelcusum

#endif  // PANELCUSUM_IO_HPP_
