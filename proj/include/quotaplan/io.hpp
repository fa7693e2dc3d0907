#pragma once

// Model specification files, history tables, sample files and forecast
// record tables. Schemas are documented in docs/formats.md.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quotaplan/calibration.hpp"
#include "quotaplan/errors.hpp"
#include "quotaplan/planner.hpp"
#include "quotaplan/pmf.hpp"

namespace quotaplan::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses JSON text, reporting syntax errors with line and column.
inline json parse_json(std::string_view text, std::string_view source = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": invalid JSON");
  }
}

// ---------------------------------------------------------------------------
// Tabular files

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> to_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> to_integer(std::string_view s) {
  const auto v = to_number(s);
  if (!v || std::floor(*v) != *v || std::abs(*v) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(*v);
}

struct Row {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

/// Non-blank, non-comment lines of a comma-separated table.
inline std::vector<Row> table_rows(std::string_view text) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    const auto line = trim(raw);
    if (!line.empty() && line.front() != '#') rows.push_back({line_no, split(line, ',')});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return rows;
}

/// One numeric column: either a bare list, or a table whose header names a
/// `value` column.
inline std::vector<std::pair<std::size_t, std::string>> value_column(std::string_view text,
                                                                     std::string_view source) {
  auto rows = table_rows(text);
  if (rows.empty()) throw EmptyDataError(std::string(source) + ": no data rows");
  std::size_t column = 0;
  std::size_t first = 0;
  const bool header = !to_number(rows.front().cells.front()) ||
                      (rows.front().cells.size() > 1 && !to_number(rows.front().cells.back()));
  if (header) {
    const auto& names = rows.front().cells;
    auto it = std::find(names.begin(), names.end(), "value");
    if (it != names.end()) {
      column = static_cast<std::size_t>(it - names.begin());
    } else if (names.size() != 1) {
      throw SchemaError(std::string(source) + ": header has no 'value' column");
    }
    first = 1;
  } else if (rows.front().cells.size() != 1) {
    throw SchemaError(std::string(source) + ": multi-column table needs a header with a 'value' column");
  }
  std::vector<std::pair<std::size_t, std::string>> out;
  for (std::size_t i = first; i < rows.size(); ++i) {
    if (column >= rows[i].cells.size()) {
      throw ParseError(std::string(source) + ":" + std::to_string(rows[i].line) + ": missing value column");
    }
    out.emplace_back(rows[i].line, rows[i].cells[column]);
  }
  if (out.empty()) throw EmptyDataError(std::string(source) + ": no data rows");
  return out;
}

}  // namespace detail

/// Integer observations, one per row (e.g. yearly counts).
inline std::vector<std::int64_t> parse_history_table(std::string_view text, std::string_view source = "history") {
  std::vector<std::int64_t> values;
  for (const auto& [line, cell] : detail::value_column(text, source)) {
    const auto v = detail::to_integer(cell);
    if (!v) {
      throw ParseError(std::string(source) + ":" + std::to_string(line) + ": '" + cell +
                       "' is not an integer");
    }
    values.push_back(*v);
  }
  return values;
}

/// Real-valued draws, one per row.
inline std::vector<double> parse_sample_table(std::string_view text, std::string_view source = "sample") {
  std::vector<double> values;
  for (const auto& [line, cell] : detail::value_column(text, source)) {
    const auto v = detail::to_number(cell);
    if (!v) {
      throw ParseError(std::string(source) + ":" + std::to_string(line) + ": '" + cell +
                       "' is not a number");
    }
    values.push_back(*v);
  }
  return values;
}

inline EmpiricalSample<double> load_sample(const std::filesystem::path& path) {
  return EmpiricalSample<double>(parse_sample_table(read_file(path), path.string()));
}

/// Step-function forecast that reproduces the given percentiles under the
/// nearest-rank rule: mass l_1 at v_1, l_i - l_{i-1} at v_i, and the
/// remainder at the last value.
inline DiscretePMF pmf_from_percentiles(const std::map<double, std::int64_t>& by_level) {
  if (by_level.empty()) throw EmptyDataError("no percentiles given");
  std::map<std::int64_t, double> mass;
  double prev = 0.0;
  std::optional<std::int64_t> last;
  for (const auto& [level, value] : by_level) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("percentile level outside (0, 1)");
    if (last && value < *last) throw ValidationError("percentiles decrease with level");
    mass[value] += level - prev;
    prev = level;
    last = value;
  }
  mass[*last] += 1.0 - prev;
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  for (const auto& [v, p] : mass) {
    support.push_back(v);
    probs.push_back(p);
  }
  return DiscretePMF(std::move(support), std::move(probs));
}

/// "v:p;v:p;..." as used in the pmf column of record tables.
inline DiscretePMF parse_inline_pmf(std::string_view text) {
  std::map<std::int64_t, double> entries;
  for (const auto& item : detail::split(text, ';')) {
    if (item.empty()) continue;
    const auto parts = detail::split(item, ':');
    if (parts.size() != 2) throw ParseError("pmf entry '" + item + "' is not value:probability");
    const auto v = detail::to_integer(parts[0]);
    const auto p = detail::to_number(parts[1]);
    if (!v || !p) throw ParseError("pmf entry '" + item + "' is not value:probability");
    if (!entries.emplace(*v, *p).second) throw ValidationError("pmf value " + parts[0] + " repeated");
  }
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  for (const auto& [v, p] : entries) {
    support.push_back(v);
    probs.push_back(p);
  }
  if (support.empty()) throw EmptyDataError("empty pmf");
  return DiscretePMF(std::move(support), std::move(probs));
}

/// Forecast records table. Columns: `observed` (required) and exactly one
/// forecast encoding per row: `pmf`, `sample` (space-separated draws) or a
/// group of percentile columns `q<percent>`; optional `p_gt_<threshold>`
/// columns carry event probabilities; other columns (e.g. `id`) are ignored.
inline std::vector<ForecastRecord> parse_forecast_records(std::string_view text,
                                                          std::string_view source = "records") {
  const auto rows = detail::table_rows(text);
  if (rows.size() < 2) throw EmptyDataError(std::string(source) + ": no forecast records");
  const auto& header = rows.front().cells;
  std::optional<std::size_t> observed_col, pmf_col, sample_col;
  std::vector<std::pair<std::size_t, double>> percentile_cols;
  std::vector<std::pair<std::size_t, double>> event_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == "observed") {
      observed_col = c;
    } else if (name == "pmf") {
      pmf_col = c;
    } else if (name == "sample") {
      sample_col = c;
    } else if (name.size() > 1 && name[0] == 'q' && detail::to_number(name.substr(1))) {
      percentile_cols.emplace_back(c, *detail::to_number(name.substr(1)) / 100.0);
    } else if (name.rfind("p_gt_", 0) == 0) {
      const auto t = detail::to_number(name.substr(5));
      if (!t) throw SchemaError(std::string(source) + ": bad event column '" + name + "'");
      event_cols.emplace_back(c, *t);
    }
  }
  if (!observed_col) throw SchemaError(std::string(source) + ": missing 'observed' column");
  if (!pmf_col && !sample_col && percentile_cols.empty()) {
    throw SchemaError(std::string(source) + ": no forecast column (pmf, sample or q<percent>)");
  }
  std::sort(percentile_cols.begin(), percentile_cols.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });

  std::vector<ForecastRecord> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = std::string(source) + ": row " + std::to_string(r) + " (line " +
                              std::to_string(row.line) + ")";
    auto cell = [&](std::size_t c) -> std::string {
      return c < row.cells.size() ? row.cells[c] : std::string();
    };
    try {
      const auto observed = detail::to_number(cell(*observed_col));
      if (!observed) throw ParseError("observed value '" + cell(*observed_col) + "' is not a number");

      std::vector<Forecast> encodings;
      if (pmf_col && !cell(*pmf_col).empty()) encodings.emplace_back(parse_inline_pmf(cell(*pmf_col)));
      if (sample_col && !cell(*sample_col).empty()) {
        std::vector<double> draws;
        std::istringstream in(cell(*sample_col));
        std::string tok;
        while (in >> tok) {
          const auto v = detail::to_number(tok);
          if (!v) throw ParseError("sample draw '" + tok + "' is not a number");
          draws.push_back(*v);
        }
        encodings.emplace_back(EmpiricalSample<double>(std::move(draws)));
      }
      std::map<double, std::int64_t> percentiles;
      std::optional<std::pair<double, std::int64_t>> prev;
      for (const auto& [c, level] : percentile_cols) {
        if (cell(c).empty()) continue;
        const auto v = detail::to_integer(cell(c));
        if (!v) throw ValidationError("percentile q" + header[c].substr(1) + " must be an integer");
        if (prev && *v < prev->second) {
          throw ValidationError(header[c] + " (" + std::to_string(*v) + ") is below q" +
                                std::to_string(static_cast<int>(std::lround(prev->first * 100))) + " (" +
                                std::to_string(prev->second) + ")");
        }
        percentiles[level] = *v;
        prev = {level, *v};
      }
      if (!percentiles.empty()) encodings.emplace_back(pmf_from_percentiles(percentiles));
      if (encodings.size() != 1) {
        throw ValidationError("exactly one forecast encoding per row is required");
      }

      ForecastRecord rec{std::move(encodings.front()), *observed, {}};
      for (const auto& [c, threshold] : event_cols) {
        if (cell(c).empty()) continue;
        const auto p = detail::to_number(cell(c));
        if (!p || *p < 0.0 || *p > 1.0) throw ValidationError(header[c] + " must be a probability");
        rec.events.push_back({threshold, *p});
      }
      records.push_back(std::move(rec));
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const EmptyDataError& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const Error& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return records;
}

inline std::vector<ForecastRecord> load_forecast_records(const std::filesystem::path& path) {
  return parse_forecast_records(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Model specification

struct LoadedModel {
  std::string name;
  PlanningModel model;
  /// One line per derivation step.
  std::vector<std::string> log;
};

namespace detail {

inline std::string describe(const DiscretePMF& d) {
  std::ostringstream os;
  os << "support [" << d.min() << ", " << d.max() << "] over " << d.size() << " points, mean " << d.mean();
  return os.str();
}

inline std::int64_t require_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) {
    if (j.is_number_float() && std::floor(j.get<double>()) == j.get<double>()) {
      return static_cast<std::int64_t>(j.get<double>());
    }
    throw SchemaError("field '" + field + "': expected an integer");
  }
  return j.get<std::int64_t>();
}

inline double require_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw SchemaError("field '" + field + "': expected a number");
  return j.get<double>();
}

/// {"value": probability, ...} with non-negative integer keys.
inline DiscretePMF pmf_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || j.empty()) throw SchemaError("field '" + field + "': expected a non-empty object of value: probability");
  std::map<std::int64_t, double> entries;
  for (const auto& [key, value] : j.items()) {
    const auto v = to_integer(key);
    if (!v || *v < 0) throw ValidationError("field '" + field + "': key '" + key + "' is not a non-negative integer");
    entries[*v] = require_number(value, field + "." + key);
  }
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  double total = 0.0;
  for (const auto& [v, p] : entries) {
    if (p < 0.0) throw ValidationError("field '" + field + "': negative probability at " + std::to_string(v));
    support.push_back(v);
    probs.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os << "field '" << field << "': probabilities sum to " << total << ", not 1";
    throw ValidationError(os.str());
  }
  try {
    return DiscretePMF(std::move(support), std::move(probs));
  } catch (const Error& e) {
    throw ValidationError("field '" + field + "': " + e.what());
  }
}

inline json pmf_to_json(const DiscretePMF& d) {
  json j = json::object();
  for (std::size_t i = 0; i < d.size(); ++i) j[std::to_string(d.support()[i])] = d.probs()[i];
  return j;
}

/// History as a yearly list, a value -> count object, or a table file path.
inline DiscretePMF history_from_json(const json& j, const std::string& field,
                                     const std::optional<std::filesystem::path>& base_dir,
                                     std::vector<std::string>& log) {
  if (j.is_array()) {
    std::vector<std::int64_t> values;
    for (std::size_t i = 0; i < j.size(); ++i) {
      values.push_back(require_integer(j[i], field + "[" + std::to_string(i) + "]"));
    }
    if (values.empty()) throw EmptyDataError("field '" + field + "': history is empty");
    for (auto v : values) {
      if (v < 0) throw ValidationError("field '" + field + "': negative value " + std::to_string(v));
    }
    log.push_back(field + ": empirical distribution of " + std::to_string(values.size()) + " yearly values");
    return pmf_from_values(values);
  }
  if (j.is_object()) {
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto& [key, value] : j.items()) {
      const auto v = to_integer(key);
      if (!v || *v < 0) throw ValidationError("field '" + field + "': key '" + key + "' is not a non-negative integer");
      counts[*v] = require_integer(value, field + "." + key);
    }
    try {
      log.push_back(field + ": empirical distribution from value counts");
      return pmf_from_counts(counts);
    } catch (const Error& e) {
      throw ValidationError("field '" + field + "': " + e.what());
    }
  }
  if (j.is_string()) {
    if (!base_dir) throw SchemaError("field '" + field + "': file references are only allowed in model files");
    const auto path = *base_dir / j.get<std::string>();
    const auto values = parse_history_table(read_file(path), path.string());
    for (auto v : values) {
      if (v < 0) throw ValidationError("field '" + field + "': negative value " + std::to_string(v));
    }
    log.push_back(field + ": empirical distribution of " + std::to_string(values.size()) +
                  " values from " + path.string());
    return pmf_from_values(values);
  }
  throw SchemaError("field '" + field + "': expected a list, a value-count object or a file name");
}

inline std::vector<Cohort> cohorts_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("field 'acceptance_history': expected a list");
  std::vector<Cohort> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = "acceptance_history[" + std::to_string(i) + "]";
    const auto& e = j[i];
    if (e.is_array() && e.size() == 2) {
      out.push_back({require_integer(e[0], f + "[0]"), require_integer(e[1], f + "[1]")});
    } else if (e.is_object() && e.contains("offers") && e.contains("acceptances")) {
      out.push_back({require_integer(e["offers"], f + ".offers"),
                     require_integer(e["acceptances"], f + ".acceptances")});
    } else {
      throw SchemaError("field '" + f + "': expected {offers, acceptances} or [offers, acceptances]");
    }
  }
  return out;
}

inline BetaParams beta_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("beta")) {
    throw SchemaError("field '" + field + "': expected {alpha, beta}");
  }
  return {require_number(j["alpha"], field + ".alpha"), require_number(j["beta"], field + ".beta")};
}

inline const std::vector<std::string>& known_model_fields() {
  static const std::vector<std::string> fields{
      "schema_version", "name", "ta_positions", "current_students", "adjustment_d", "experts",
      "r1_pmf", "r2_history", "r2_pmf", "leaving_history", "leaving_pmf", "graduating_pmf",
      "acceptance_fixed", "acceptance_estimate", "acceptance_history", "acceptance_prior",
      "acceptance_beta"};
  return fields;
}

inline const json& require_field(const json& spec, const std::string& field) {
  if (!spec.contains(field)) throw SchemaError("missing required field '" + field + "'");
  return spec[field];
}

/// Exactly one of `choices` must be present.
inline std::string one_of(const json& spec, std::initializer_list<const char*> choices) {
  std::vector<std::string> present;
  std::string names;
  for (const char* c : choices) {
    names += names.empty() ? std::string("'") + c + "'" : std::string(" or '") + c + "'";
    if (spec.contains(c)) present.emplace_back(c);
  }
  if (present.size() != 1) {
    throw SchemaError(present.empty() ? "missing field " + names : "fields " + names + " are mutually exclusive");
  }
  return present.front();
}

}  // namespace detail

/// Assembles a PlanningModel from a parsed model specification. File
/// references in history fields resolve against `base_dir`; without one
/// (inline service requests) they are rejected.
inline LoadedModel model_from_json(const json& spec,
                                   const std::optional<std::filesystem::path>& base_dir = std::nullopt) {
  using namespace detail;
  if (!spec.is_object()) throw SchemaError("model specification must be a JSON object");
  for (const auto& [key, value] : spec.items()) {
    const auto& known = known_model_fields();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw SchemaError("unknown field '" + key + "'");
    }
  }
  const auto version = require_integer(require_field(spec, "schema_version"), "schema_version");
  if (version != kSchemaVersion) {
    throw SchemaError("field 'schema_version': unsupported version " + std::to_string(version));
  }

  std::vector<std::string> log;
  std::string name = spec.value("name", std::string("model"));
  const PointMass ta{require_integer(require_field(spec, "ta_positions"), "ta_positions")};
  const PointMass current{require_integer(require_field(spec, "current_students"), "current_students")};
  if (ta.value < 0) throw ValidationError("field 'ta_positions': must be non-negative");
  if (current.value < 0) throw ValidationError("field 'current_students': must be non-negative");
  const PointMass adjustment{spec.contains("adjustment_d") ? require_integer(spec["adjustment_d"], "adjustment_d") : 0};
  log.push_back("T = " + std::to_string(ta.value) + ", C = " + std::to_string(current.value) +
                ", D = " + std::to_string(adjustment.value));

  // R1: convolution of the experts' elicited distributions.
  std::optional<DiscretePMF> r1;
  if (one_of(spec, {"experts", "r1_pmf"}) == "experts") {
    const auto& experts = spec["experts"];
    if (!experts.is_array() || experts.empty()) throw SchemaError("field 'experts': expected a non-empty list");
    std::vector<DiscretePMF> elicited;
    for (std::size_t i = 0; i < experts.size(); ++i) {
      const auto& e = experts[i];
      const std::string f = "experts[" + std::to_string(i) + "]";
      if (!e.is_object() || !e.contains("id") || !e["id"].is_string() || !e.contains("pmf")) {
        throw SchemaError("field '" + f + "': expected {id, pmf}");
      }
      elicited.push_back(pmf_from_json(e["pmf"], f + ".pmf (expert " + e["id"].get<std::string>() + ")"));
      log.push_back("R1 expert " + e["id"].get<std::string>() + ": " + describe(elicited.back()));
    }
    const std::vector<Sign> signs(elicited.size(), Sign::Plus);
    r1 = convolve(elicited, signs);
    log.push_back("R1 = convolution of " + std::to_string(elicited.size()) + " expert distributions: " +
                  describe(*r1));
  } else {
    r1 = pmf_from_json(spec["r1_pmf"], "r1_pmf");
    log.push_back("R1 given directly: " + describe(*r1));
  }

  auto history_or_pmf = [&](const char* history, const char* pmf, const char* label) {
    DiscretePMF d = one_of(spec, {history, pmf}) == history
                        ? history_from_json(spec[history], history, base_dir, log)
                        : pmf_from_json(spec[pmf], pmf);
    log.push_back(std::string(label) + ": " + describe(d));
    return d;
  };
  DiscretePMF r2 = history_or_pmf("r2_history", "r2_pmf", "R2");
  DiscretePMF leaving = history_or_pmf("leaving_history", "leaving_pmf", "L");
  DiscretePMF graduating = pmf_from_json(require_field(spec, "graduating_pmf"), "graduating_pmf");
  log.push_back("G: " + describe(graduating));

  std::optional<AcceptanceModel> acceptance;
  const std::string source =
      one_of(spec, {"acceptance_fixed", "acceptance_estimate", "acceptance_history", "acceptance_beta"});
  if (spec.contains("acceptance_prior") && source != "acceptance_history") {
    throw SchemaError("field 'acceptance_prior' requires 'acceptance_history'");
  }
  try {
    if (source == "acceptance_fixed" || source == "acceptance_estimate") {
      const double pi = require_number(spec[source], source);
      acceptance = source == "acceptance_fixed" ? AcceptanceModel::fixed(pi) : AcceptanceModel::estimate(pi);
      log.push_back("A: Binomial(O, pi) with " +
                    std::string(source == "acceptance_fixed" ? "fixed" : "previously estimated") +
                    " pi = " + std::to_string(pi));
    } else if (source == "acceptance_history") {
      const auto history = cohorts_from_json(spec["acceptance_history"]);
      if (spec.contains("acceptance_prior")) {
        const auto prior = beta_from_json(spec["acceptance_prior"], "acceptance_prior");
        acceptance = AcceptanceModel::beta_posterior(history, prior);
        log.push_back("A: beta-binomial predictive, posterior Beta(" +
                      std::to_string(acceptance->beta_params()->alpha) + ", " +
                      std::to_string(acceptance->beta_params()->beta) + ")");
      } else {
        acceptance = AcceptanceModel::pooled(history);
        log.push_back("A: Binomial(O, pi) with pooled pi = " + std::to_string(acceptance->pi()) +
                      " from " + std::to_string(history.size()) + " cohorts");
      }
    } else {
      acceptance = AcceptanceModel::beta(beta_from_json(spec["acceptance_beta"], "acceptance_beta"));
      log.push_back("A: beta-binomial predictive, Beta(" + std::to_string(acceptance->beta_params()->alpha) +
                    ", " + std::to_string(acceptance->beta_params()->beta) + ")");
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const EmptyDataError& e) {
    throw EmptyDataError("field '" + source + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("field '" + source + "': " + e.what());
  } catch (const Error& e) {
    throw ValidationError("field '" + source + "': " + e.what());
  }

  PlanningModel model{ta, current, *r1, r2, graduating, leaving, *acceptance, adjustment};
  model.validate();
  return {std::move(name), std::move(model), std::move(log)};
}

inline LoadedModel parse_model(std::string_view text, std::string_view source = "model",
                               const std::optional<std::filesystem::path>& base_dir = std::nullopt) {
  return model_from_json(parse_json(text, source), base_dir);
}

inline LoadedModel load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path), path.string(), path.parent_path());
}

/// Canonical specification of an assembled model; loading it gives back an
/// identical PlanningModel.
inline json model_to_json(const PlanningModel& model, const std::string& name = "model") {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = name;
  j["ta_positions"] = model.ta_positions.value;
  j["current_students"] = model.current_students.value;
  j["adjustment_d"] = model.adjustment.value;
  j["r1_pmf"] = detail::pmf_to_json(model.ra_internal);
  j["r2_pmf"] = detail::pmf_to_json(model.ra_external);
  j["graduating_pmf"] = detail::pmf_to_json(model.graduating);
  j["leaving_pmf"] = detail::pmf_to_json(model.leaving);
  switch (model.acceptance.provenance()) {
    case AcceptanceProvenance::Fixed: j["acceptance_fixed"] = model.acceptance.pi(); break;
    case AcceptanceProvenance::PooledEstimate: j["acceptance_estimate"] = model.acceptance.pi(); break;
    case AcceptanceProvenance::BetaPosterior:
      j["acceptance_beta"] = {{"alpha", model.acceptance.beta_params()->alpha},
                              {"beta", model.acceptance.beta_params()->beta}};
      break;
  }
  return j;
}

}  // namespace quotaplan::io
