#pragma once

// File formats: curve and point CSV, raw drifter CSV preprocessing, the JSON
// run configuration and result documents.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthgate/decision.hpp"
#include "depthgate/depth.hpp"
#include "depthgate/ls_core.hpp"
#include "depthgate/model.hpp"
#include "depthgate/numfmt.hpp"
#include "depthgate/simulate.hpp"

namespace depthgate {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// CSV primitives

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

inline bool is_missing(std::string_view cell) {
  const std::string t = trim(cell);
  return t.empty() || t == "NA";
}

inline std::string located(std::size_t row, std::size_t col, const std::string& msg) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + msg;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(ErrorKind::parse, "cannot open '" + path + "'");
  return in;
}

/// Non-empty lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    out.emplace_back(no, line);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curves

/// Header row = grid, then one curve per row; "NA" or empty = missing.
/// All-NA rows are an error unless drop_empty is set.
inline FunctionalSample read_curves(std::istream& in, bool drop_empty = false) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw DataError(ErrorKind::parse, "curve file is empty");
  std::vector<double> grid;
  {
    const auto cells = split_csv_line(lines[0].second);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        grid.push_back(parse_double(cells[c], "grid coordinate"));
      } catch (const DataError& e) {
        throw DataError(ErrorKind::parse, located(lines[0].first, c + 1, e.what()));
      }
    }
  }
  Grid g(std::move(grid));
  std::vector<std::vector<double>> curves;
  std::vector<std::vector<bool>> masks;
  bool any_missing = false;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r].second);
    if (cells.size() != g.size())
      throw DataError(ErrorKind::parse, "row " + std::to_string(lines[r].first) + ": expected " +
                                            std::to_string(g.size()) + " cells, found " + std::to_string(cells.size()));
    std::vector<double> v(g.size(), 0.0);
    std::vector<bool> mask(g.size(), true);
    std::size_t observed = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (is_missing(cells[c])) {
        mask[c] = false;
        any_missing = true;
        continue;
      }
      try {
        v[c] = parse_double(cells[c], "curve value");
      } catch (const DataError& e) {
        throw DataError(ErrorKind::parse, located(lines[r].first, c + 1, e.what()));
      }
      if (!std::isfinite(v[c]))
        throw DataError(ErrorKind::non_finite, located(lines[r].first, c + 1, "value is not finite"));
      ++observed;
    }
    if (observed == 0) {
      if (drop_empty) continue;
      throw DataError(ErrorKind::invalid_sample,
                      "row " + std::to_string(lines[r].first) + ": curve has no observed value (use --drop-empty)");
    }
    curves.push_back(std::move(v));
    masks.push_back(std::move(mask));
  }
  if (curves.empty()) throw DataError(ErrorKind::empty_sample, "curve file has no data rows");
  if (!any_missing) masks.clear();
  return FunctionalSample(std::move(g), std::move(curves), std::move(masks));
}

inline FunctionalSample read_curves(const std::string& path, bool drop_empty = false) {
  auto in = open_input(path);
  return read_curves(in, drop_empty);
}

inline void write_curves(std::ostream& out, const FunctionalSample& s) {
  const auto grid = s.grid().points();
  for (std::size_t t = 0; t < grid.size(); ++t) out << (t ? "," : "") << format_double(grid[t]);
  out << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t t = 0; t < s.grid_size(); ++t) {
      if (t) out << ',';
      out << (s.observed(i, t) ? format_double(s.value(i, t)) : "NA");
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Points

/// Header row of column names, then one point per row.
inline MultivariateSample read_points(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw DataError(ErrorKind::parse, "point file is empty");
  const std::size_t dim = split_csv_line(lines[0].second).size();
  std::vector<std::vector<double>> pts;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r].second);
    if (cells.size() != dim)
      throw DataError(ErrorKind::dimension_mismatch, "row " + std::to_string(lines[r].first) + ": expected " +
                                                         std::to_string(dim) + " coordinates, found " +
                                                         std::to_string(cells.size()));
    std::vector<double> x(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      if (is_missing(cells[c])) throw DataError(ErrorKind::parse, located(lines[r].first, c + 1, "missing coordinate"));
      try {
        x[c] = parse_double(cells[c], "coordinate");
      } catch (const DataError& e) {
        throw DataError(ErrorKind::parse, located(lines[r].first, c + 1, e.what()));
      }
      if (!std::isfinite(x[c])) throw DataError(ErrorKind::non_finite, located(lines[r].first, c + 1, "value is not finite"));
    }
    pts.push_back(std::move(x));
  }
  if (pts.empty()) throw DataError(ErrorKind::empty_sample, "point file has no data rows");
  return MultivariateSample(dim, std::move(pts));
}

inline MultivariateSample read_points(const std::string& path) {
  auto in = open_input(path);
  return read_points(in);
}

inline void write_points(std::ostream& out, const MultivariateSample& s) {
  for (std::size_t j = 0; j < s.dim(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.dim(); ++j) out << (j ? "," : "") << format_double(s.coord(i, j));
    out << '\n';
  }
}

enum class SampleKind { curves, points, automatic };

/// Curves when every header cell is numeric, points otherwise (or as forced).
inline Sample read_sample(const std::string& path, SampleKind kind = SampleKind::automatic, bool drop_empty = false) {
  if (kind == SampleKind::automatic) {
    auto in = open_input(path);
    std::string header;
    while (std::getline(in, header) && trim(header).empty()) {
    }
    bool numeric = !trim(header).empty();
    for (const auto& cell : split_csv_line(header)) {
      try {
        parse_double(cell);
      } catch (const DataError&) {
        numeric = false;
      }
    }
    kind = numeric ? SampleKind::curves : SampleKind::points;
  }
  if (kind == SampleKind::curves) return read_curves(path, drop_empty);
  return read_points(path);
}

// ---------------------------------------------------------------------------
// Drifter preprocessing

namespace calendar {

/// Days since 1970-01-01 of a proleptic Gregorian date.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr std::array<unsigned, 12> len{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : len[m - 1];
}

}  // namespace calendar

/// Seconds since the epoch (UTC) from "YYYY-MM-DD[(T| )HH:MM[:SS[.frac]]][Z|(+|-)HH[:]MM]".
inline std::int64_t parse_timestamp(std::string_view s) {
  const std::string text = trim(s);
  auto fail = [&]() -> std::int64_t { throw DataError(ErrorKind::parse, "cannot parse timestamp '" + text + "'"); };
  std::size_t pos = 0;
  auto number = [&](std::size_t digits) {
    if (pos + digits > text.size()) fail();
    long long v = 0;
    for (std::size_t k = 0; k < digits; ++k) {
      const char c = text[pos + k];
      if (c < '0' || c > '9') fail();
      v = v * 10 + (c - '0');
    }
    pos += digits;
    return v;
  };
  auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c) fail();
    ++pos;
  };
  const long long y = number(4);
  expect('-');
  const auto mo = static_cast<unsigned>(number(2));
  expect('-');
  const auto d = static_cast<unsigned>(number(2));
  if (mo < 1 || mo > 12 || d < 1 || d > calendar::days_in_month(y, mo)) fail();
  long long hh = 0, mi = 0, ss = 0;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    ++pos;
    hh = number(2);
    expect(':');
    mi = number(2);
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      ss = number(2);
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        if (pos >= text.size() || text[pos] < '0' || text[pos] > '9') fail();
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
      }
    }
    if (hh > 23 || mi > 59 || ss > 60) fail();
  }
  long long offset = 0;
  if (pos < text.size()) {
    if (text[pos] == 'Z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      const int sign = text[pos] == '-' ? -1 : 1;
      ++pos;
      const long long oh = number(2);
      if (pos < text.size() && text[pos] == ':') ++pos;
      const long long om = number(2);
      offset = sign * (oh * 3600 + om * 60);
    }
  }
  if (pos != text.size()) fail();
  return calendar::days_from_civil(y, mo, d) * 86400 + hh * 3600 + mi * 60 + ss - offset;
}

enum class DrifterMode { full, masked };

struct DrifterCurves {
  std::vector<std::string> ids;
  FunctionalSample sample;
  std::size_t dropped = 0;
};

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

/// Daily medians per drifter on a 365-day grid t_d = (d-1)/364 (UTC calendar days).
inline DrifterCurves prep_drifter(std::istream& in, int year, DrifterMode mode) {
  const auto lines = read_lines(in);
  const std::int64_t first_day = calendar::days_from_civil(year, 1, 1);
  const bool leap = calendar::is_leap(year);
  const std::size_t raw_days = leap ? 366 : 365;

  std::map<std::string, std::vector<std::vector<double>>> readings;  // id -> day -> values
  std::set<std::pair<std::string, std::int64_t>> seen;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r].second);
    const std::size_t row = lines[r].first;
    if (cells.size() < 3)
      throw DataError(ErrorKind::parse, "row " + std::to_string(row) + ": expected id, timestamp, temperature");
    std::int64_t ts = 0;
    try {
      ts = parse_timestamp(cells[1]);
    } catch (const DataError& e) {
      if (r == 0) continue;  // header row
      throw DataError(ErrorKind::parse, located(row, 2, e.what()));
    }
    const std::string id = trim(cells[0]);
    if (!seen.emplace(id, ts).second)
      throw DataError(ErrorKind::parse, "row " + std::to_string(row) + ": duplicate reading for drifter '" + id + "'");
    auto& days = readings[id];
    if (days.empty()) days.resize(raw_days);
    const std::int64_t day = (ts >= 0 ? ts / 86400 : (ts - 86399) / 86400) - first_day;
    if (day < 0 || day >= static_cast<std::int64_t>(raw_days)) continue;
    if (is_missing(cells[2])) continue;
    double v = 0.0;
    try {
      v = parse_double(cells[2], "temperature");
    } catch (const DataError& e) {
      throw DataError(ErrorKind::parse, located(row, 3, e.what()));
    }
    if (!std::isfinite(v)) throw DataError(ErrorKind::non_finite, located(row, 3, "temperature is not finite"));
    days[static_cast<std::size_t>(day)].push_back(v);
  }

  std::vector<double> grid(365);
  for (std::size_t d = 0; d < 365; ++d) grid[d] = static_cast<double>(d) / 364.0;

  DrifterCurves out{{}, FunctionalSample(Grid({0.0, 1.0}), {{0.0, 0.0}}), 0};
  std::vector<std::vector<double>> curves;
  std::vector<std::vector<bool>> masks;
  for (const auto& [id, days] : readings) {
    std::vector<std::optional<double>> med(raw_days);
    for (std::size_t d = 0; d < raw_days; ++d)
      if (!days[d].empty()) med[d] = median_of(days[d]);
    if (leap) {
      auto avg = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
        if (a && b) return 0.5 * (*a + *b);
        return a ? a : b;
      };
      constexpr std::size_t feb28 = 58, feb29 = 59, mar1 = 60;
      const auto f28 = med[feb28], f29 = med[feb29], m1 = med[mar1];
      med[feb28] = avg(f28, f29);
      med[mar1] = avg(f29, m1);
      med.erase(med.begin() + feb29);
    }
    std::vector<double> v(365, 0.0);
    std::vector<bool> mask(365, true);
    std::size_t observed = 0;
    for (std::size_t d = 0; d < 365; ++d) {
      if (med[d]) {
        v[d] = *med[d];
        ++observed;
      } else {
        mask[d] = false;
      }
    }
    if (observed == 0 || (mode == DrifterMode::full && observed < 365)) {
      ++out.dropped;
      continue;
    }
    out.ids.push_back(id);
    curves.push_back(std::move(v));
    masks.push_back(std::move(mask));
  }
  if (curves.empty()) throw DataError(ErrorKind::empty_sample, "no drifter curve remains after filtering");
  out.sample = FunctionalSample(Grid(std::move(grid)), std::move(curves), std::move(masks));
  return out;
}

// ---------------------------------------------------------------------------
// JSON: scenario and run configuration

namespace detail {

inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw DataError(ErrorKind::parse, where + " must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw DataError(ErrorKind::parse, where + ": unknown key '" + k + "'");
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(ErrorKind::parse, where + ": key '" + key + "' is missing or has the wrong type");
  }
}

inline std::size_t get_count(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number_unsigned()) throw DataError(ErrorKind::parse, where + ": '" + key + "' must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

}  // namespace detail

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::uniform01: return "uniform01";
    case ModelKind::uniform: return "uniform";
    case ModelKind::brownian: return "brownian";
    case ModelKind::fourier_fast: return "fourier-fast";
    case ModelKind::fourier_slow: return "fourier-slow";
    case ModelKind::shape_flat: return "shape-flat";
    case ModelKind::shape_zigzag: return "shape-zigzag";
    case ModelKind::gauss: return "gauss";
  }
  return "unknown";
}

inline const char* to_string(AltKind k) {
  switch (k) {
    case AltKind::none: return "none";
    case AltKind::shift: return "shift";
    case AltKind::sine_shift: return "sine-shift";
    case AltKind::scale: return "scale";
    case AltKind::loc_scale: return "loc-scale";
    case AltKind::outlier: return "outlier";
  }
  return "unknown";
}

inline json to_json(const DataModel& m) {
  json j;
  j["kind"] = to_string(m.kind);
  if (m.kind == ModelKind::uniform) j["upper"] = m.upper;
  if (m.kind == ModelKind::gauss) {
    j["mean"] = m.mean;
    j["cov_scale"] = m.cov_scale;
  }
  return j;
}

inline DataModel model_from_json(const json& j) {
  const std::string where = "model";
  const json obj = j.is_string() ? json{{"kind", j}} : j;
  detail::check_keys(obj, {"kind", "upper", "mean", "cov_scale"}, where);
  const auto kind = detail::get_as<std::string>(obj, "kind", where);
  DataModel m;
  static const std::map<std::string, ModelKind, std::less<>> kinds{
      {"uniform01", ModelKind::uniform01},       {"uniform", ModelKind::uniform},
      {"brownian", ModelKind::brownian},         {"fourier-fast", ModelKind::fourier_fast},
      {"fourier-slow", ModelKind::fourier_slow}, {"shape-flat", ModelKind::shape_flat},
      {"shape-zigzag", ModelKind::shape_zigzag}, {"gauss", ModelKind::gauss}};
  const auto it = kinds.find(kind);
  if (it == kinds.end()) throw DataError(ErrorKind::parse, "unknown model kind '" + kind + "'");
  m.kind = it->second;
  if (obj.contains("upper")) m.upper = detail::get_as<double>(obj, "upper", where);
  if (obj.contains("mean")) m.mean = detail::get_as<std::vector<double>>(obj, "mean", where);
  if (obj.contains("cov_scale")) m.cov_scale = detail::get_as<double>(obj, "cov_scale", where);
  return m;
}

inline json to_json(const Alternative& a) {
  json j;
  j["kind"] = to_string(a.kind);
  if (a.kind == AltKind::outlier) {
    j["count"] = a.count;
    j["offset"] = a.offset;
  } else if (a.kind != AltKind::none) {
    j["a"] = a.a;
  }
  return j;
}

inline Alternative alternative_from_json(const json& j) {
  const std::string where = "transform";
  detail::check_keys(j, {"kind", "a", "count", "offset"}, where);
  const auto kind = detail::get_as<std::string>(j, "kind", where);
  Alternative a;
  static const std::map<std::string, AltKind, std::less<>> kinds{
      {"none", AltKind::none},   {"shift", AltKind::shift},         {"sine-shift", AltKind::sine_shift},
      {"scale", AltKind::scale}, {"loc-scale", AltKind::loc_scale}, {"outlier", AltKind::outlier}};
  const auto it = kinds.find(kind);
  if (it == kinds.end()) throw DataError(ErrorKind::parse, "unknown transform kind '" + kind + "'");
  a.kind = it->second;
  if (j.contains("a")) a.a = detail::get_as<double>(j, "a", where);
  if (j.contains("count")) a.count = detail::get_count(j, "count", where);
  if (j.contains("offset")) a.offset = detail::get_as<double>(j, "offset", where);
  return a;
}

inline json to_json(const SampleSpec& s) {
  json j;
  j["model"] = to_json(s.model);
  j["transforms"] = json::array();
  for (const auto& a : s.transforms) j["transforms"].push_back(to_json(a));
  return j;
}

inline SampleSpec sample_spec_from_json(const json& j) {
  detail::check_keys(j, {"model", "transforms"}, "sample");
  SampleSpec s;
  if (!j.contains("model")) throw DataError(ErrorKind::parse, "sample: key 'model' is missing");
  s.model = model_from_json(j.at("model"));
  if (j.contains("transforms")) {
    if (!j.at("transforms").is_array()) throw DataError(ErrorKind::parse, "sample: 'transforms' must be an array");
    for (const auto& t : j.at("transforms")) s.transforms.push_back(alternative_from_json(t));
  }
  return s;
}

inline json to_json(const ScenarioSpec& s) {
  json j;
  j["name"] = s.name;
  j["p"] = to_json(s.p);
  j["q"] = to_json(s.q);
  j["m"] = s.m;
  j["n"] = s.n;
  if (s.p.model.functional()) j["grid_size"] = s.grid_size;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  return j;
}

inline ScenarioSpec scenario_from_json(const json& j) {
  const std::string where = "scenario";
  detail::check_keys(j, {"name", "p", "q", "m", "n", "grid_size", "trials", "seed"}, where);
  ScenarioSpec s;
  if (j.contains("name")) s.name = detail::get_as<std::string>(j, "name", where);
  if (!j.contains("p") || !j.contains("q")) throw DataError(ErrorKind::parse, "scenario needs 'p' and 'q'");
  s.p = sample_spec_from_json(j.at("p"));
  s.q = sample_spec_from_json(j.at("q"));
  if (j.contains("m")) s.m = detail::get_count(j, "m", where);
  if (j.contains("n")) s.n = detail::get_count(j, "n", where);
  if (j.contains("grid_size")) s.grid_size = detail::get_count(j, "grid_size", where);
  if (j.contains("trials")) s.trials = detail::get_count(j, "trials", where);
  if (j.contains("seed")) s.seed = detail::get_as<std::uint64_t>(j, "seed", where);
  return s;
}

/// Everything a simulate run needs. Unset optionals fall back to the preset.
struct RunConfig {
  std::optional<std::string> scenario_name;
  std::optional<ScenarioSpec> scenario;
  std::optional<std::string> depth;
  std::uint64_t depth_seed = 0;
  double jitter_sd = 1e-8;
  RankMode rank_mode = RankMode::tie_split;
  std::optional<std::vector<std::string>> methods;
  double alpha = 0.05;
  bool symmetric_cutoff = false;
  ContractionRule contraction{};
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> grid_size;
  std::optional<std::size_t> m;
  std::optional<std::size_t> n;
};

struct ResolvedRun {
  ScenarioSpec scenario;
  DepthSpec depth;
  std::vector<TestConfig> methods;
  RankMode rank_mode = RankMode::tie_split;
};

inline const char* to_string(ContractionRule::Xi x) {
  switch (x) {
    case ContractionRule::Xi::exp_neg_100: return "exp-neg-100";
    case ContractionRule::Xi::zero: return "zero";
    case ContractionRule::Xi::one: return "one";
  }
  return "unknown";
}

inline const char* to_string(ContractionRule::Delta d) {
  return d == ContractionRule::Delta::rate_three_quarters ? "rate-three-quarters" : "log-enlarged";
}

inline ContractionRule::Xi parse_xi(std::string_view s) {
  if (s == "exp-neg-100") return ContractionRule::Xi::exp_neg_100;
  if (s == "zero") return ContractionRule::Xi::zero;
  if (s == "one") return ContractionRule::Xi::one;
  throw DataError(ErrorKind::parse, "unknown xi rule '" + std::string(s) + "'");
}

inline ContractionRule::Delta parse_delta(std::string_view s) {
  if (s == "rate-three-quarters") return ContractionRule::Delta::rate_three_quarters;
  if (s == "log-enlarged") return ContractionRule::Delta::log_enlarged;
  throw DataError(ErrorKind::parse, "unknown delta rule '" + std::string(s) + "'");
}

inline RunConfig run_config_from_json(const json& j) {
  const std::string where = "config";
  detail::check_keys(j, {"scenario", "depth", "depth_seed", "jitter_sd", "rank_mode", "methods", "alpha",
                         "symmetric_cutoff", "contraction", "seed", "trials", "grid_size", "m", "n"},
                     where);
  RunConfig c;
  if (j.contains("scenario")) {
    if (j.at("scenario").is_string())
      c.scenario_name = j.at("scenario").get<std::string>();
    else
      c.scenario = scenario_from_json(j.at("scenario"));
  }
  if (j.contains("depth")) c.depth = detail::get_as<std::string>(j, "depth", where);
  if (j.contains("depth_seed")) c.depth_seed = detail::get_as<std::uint64_t>(j, "depth_seed", where);
  if (j.contains("jitter_sd")) c.jitter_sd = detail::get_as<double>(j, "jitter_sd", where);
  if (j.contains("rank_mode")) c.rank_mode = parse_rank_mode(detail::get_as<std::string>(j, "rank_mode", where));
  if (j.contains("methods")) c.methods = detail::get_as<std::vector<std::string>>(j, "methods", where);
  if (j.contains("alpha")) c.alpha = detail::get_as<double>(j, "alpha", where);
  if (j.contains("symmetric_cutoff")) c.symmetric_cutoff = detail::get_as<bool>(j, "symmetric_cutoff", where);
  if (j.contains("contraction")) {
    const json& r = j.at("contraction");
    detail::check_keys(r, {"xi", "delta"}, "contraction");
    if (r.contains("xi")) c.contraction.xi = parse_xi(detail::get_as<std::string>(r, "xi", "contraction"));
    if (r.contains("delta")) c.contraction.delta = parse_delta(detail::get_as<std::string>(r, "delta", "contraction"));
  }
  if (j.contains("seed")) c.seed = detail::get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("trials")) c.trials = detail::get_count(j, "trials", where);
  if (j.contains("grid_size")) c.grid_size = detail::get_count(j, "grid_size", where);
  if (j.contains("m")) c.m = detail::get_count(j, "m", where);
  if (j.contains("n")) c.n = detail::get_count(j, "n", where);
  return c;
}

inline ResolvedRun resolve(const RunConfig& c) {
  ResolvedRun r;
  Preset preset;
  if (c.scenario) {
    preset.scenario = *c.scenario;
    preset.depth = preset.scenario.p.model.functional() ? DepthSpec::integrated(InnerDepth::tukey) : DepthSpec::tukey();
    preset.methods = {TestConfig::of(Method::joint_tp)};
  } else if (c.scenario_name) {
    preset = scenario_preset(*c.scenario_name);
  } else {
    throw DataError(ErrorKind::invalid_argument, "no scenario given");
  }
  r.scenario = preset.scenario;
  if (c.seed) r.scenario.seed = *c.seed;
  if (c.trials) r.scenario.trials = *c.trials;
  if (c.grid_size) r.scenario.grid_size = *c.grid_size;
  if (c.m) r.scenario.m = *c.m;
  if (c.n) r.scenario.n = *c.n;
  r.scenario.validate();

  r.depth = c.depth ? parse_depth(*c.depth, c.depth_seed) : preset.depth;
  r.depth.seed = c.depth_seed;
  r.depth.jitter_sd = c.jitter_sd;
  r.depth.validate();
  r.rank_mode = c.rank_mode;

  if (c.methods) {
    for (const auto& name : *c.methods) r.methods.push_back(parse_method(name, c.alpha));
  } else {
    r.methods = preset.methods;
  }
  if (r.methods.empty()) throw DataError(ErrorKind::invalid_argument, "no test methods requested");
  for (auto& m : r.methods) {
    m.alpha = c.alpha;
    m.symmetric_cutoff = c.symmetric_cutoff;
    m.rule = c.contraction;
    m.validate();
  }
  return r;
}

/// Fully resolved configuration; feeding it back through run_config_from_json reproduces the run.
inline json to_json(const ResolvedRun& r) {
  json j;
  j["scenario"] = to_json(r.scenario);
  j["depth"] = format_depth(r.depth);
  j["depth_seed"] = r.depth.seed;
  j["jitter_sd"] = r.depth.jitter_sd;
  j["rank_mode"] = to_string(r.rank_mode);
  j["methods"] = json::array();
  for (const auto& m : r.methods) j["methods"].push_back(format_method(m));
  const TestConfig& first = r.methods.front();
  j["alpha"] = first.alpha;
  j["symmetric_cutoff"] = first.symmetric_cutoff;
  j["contraction"] = {{"xi", to_string(first.rule.xi)}, {"delta", to_string(first.rule.delta)}};
  return j;
}

// ---------------------------------------------------------------------------
// JSON: results

inline json to_json(const LSTuple& t) { return {{"ls_pq", t.ls_pq}, {"ls_qp", t.ls_qp}, {"m", t.m}, {"n", t.n}}; }

inline json to_json(const TestOutcome& o, const TestConfig& cfg) {
  json j;
  j["method"] = format_method(cfg);
  j["alpha"] = o.alpha;
  j["reject"] = o.reject;
  j["p_value"] = o.p_value;
  j["below_resolution"] = o.below_resolution;
  json st = json::object();
  for (const auto& [k, v] : o.statistics) st[k] = v;
  j["statistics"] = st;
  return j;
}

inline json to_json(const ExperimentResult& res, const ResolvedRun& run) {
  json j;
  j["config"] = to_json(run);
  j["trials"] = res.scenario.trials;
  j["methods"] = json::array();
  for (const auto& m : res.methods)
    j["methods"].push_back({{"method", format_method(m.config)},
                            {"alpha", m.config.alpha},
                            {"rejections", m.rejections},
                            {"rate", m.rate},
                            {"half_width", m.half_width}});
  if (!res.tuples.empty()) {
    j["tuples"] = json::array();
    for (const auto& t : res.tuples) j["tuples"].push_back({t.ls_pq, t.ls_qp});
  }
  return j;
}

inline void write_rates_csv(std::ostream& out, const ExperimentResult& res) {
  out << "method,rejections,trials,rate,half_width\n";
  for (const auto& m : res.methods)
    out << format_method(m.config) << ',' << m.rejections << ',' << res.scenario.trials << ','
        << format_double(m.rate) << ',' << format_double(m.half_width) << '\n';
}

inline void write_scatter_csv(std::ostream& out, const std::vector<LSTuple>& tuples) {
  out << "ls_pq,ls_qp\n";
  for (const auto& t : tuples) out << format_double(t.ls_pq) << ',' << format_double(t.ls_qp) << '\n';
}

}  // namespace depthgate
