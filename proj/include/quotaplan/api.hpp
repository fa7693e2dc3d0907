#pragma once

// Requests and machine-readable payloads shared by the CLI (--format machine)
// and the HTTP service. Both front ends build the same request structs and
// serialise results through the same functions, so their numbers agree.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "quotaplan/calibration.hpp"
#include "quotaplan/decision.hpp"
#include "quotaplan/errors.hpp"
#include "quotaplan/io.hpp"
#include "quotaplan/planner.hpp"

namespace quotaplan::api {

using nlohmann::json;

inline constexpr int kPayloadSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Requests

struct ScanRequest {
  PlanningModel model;
  std::vector<std::int64_t> offers;
  EngineOptions engine;
};

struct ForecastRequest {
  PlanningModel model;
  std::int64_t offers = 0;
  EngineOptions engine;
};

struct BreakEvenRequest {
  PlanningModel model;
  OfferRange range;
};

struct ModelSource {
  PlanningModel model;
  std::int64_t offers = 0;
  EngineOptions engine;
};

struct ProductRequest {
  std::variant<ModelSource, EmpiricalSample<double>> source;
  UserType user = UserType::LowStakes;
  ProductOptions options;
};

struct SummarizeRequest {
  EmpiricalSample<double> sample;
  std::vector<double> thresholds;
  double suppress = kDefaultSuppression;
};

struct CalibrateRequest {
  std::vector<ForecastRecord> records;
  CalibrationOptions options;
};

// ---------------------------------------------------------------------------
// JSON field helpers

namespace detail {

inline const json& field(const json& body, const char* name) {
  if (!body.is_object()) throw SchemaError("request body must be a JSON object");
  if (!body.contains(name)) throw SchemaError(std::string("field '") + name + "' is required");
  return body[name];
}

inline double number(const json& j, const std::string& name) {
  if (!j.is_number()) throw SchemaError("field '" + name + "': expected a number");
  return j.get<double>();
}

inline std::int64_t integer(const json& j, const std::string& name) {
  if (!j.is_number_integer()) throw SchemaError("field '" + name + "': expected an integer");
  return j.get<std::int64_t>();
}

inline std::optional<double> optional_number(const json& body, const char* name) {
  if (!body.contains(name) || body[name].is_null()) return std::nullopt;
  return number(body[name], name);
}

inline std::vector<double> numbers(const json& j, const std::string& name) {
  if (!j.is_array()) throw SchemaError("field '" + name + "': expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

inline PlanningModel model(const json& body) {
  try {
    return io::model_from_json(field(body, "model")).model;
  } catch (const SchemaError& e) {
    throw SchemaError(std::string("model: ") + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
}

inline Seed seed(const json& j) {
  if (j.is_number_unsigned()) return Seed{j.get<std::uint64_t>()};
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return Seed{static_cast<std::uint64_t>(j.get<std::int64_t>())};
  }
  throw SchemaError("field 'seed': expected a non-negative integer");
}

inline EngineOptions engine(const json& body) {
  EngineOptions opts;
  if (body.contains("engine")) {
    const auto& e = body["engine"];
    const std::string kind = e.is_string() ? e.get<std::string>() : "";
    if (kind == "exact") {
      opts.choice = EngineChoice::Exact;
    } else if (kind == "mc") {
      opts.choice = EngineChoice::MonteCarlo;
    } else if (kind == "auto") {
      opts.choice = EngineChoice::Auto;
    } else {
      throw SchemaError("field 'engine': expected \"exact\", \"mc\" or \"auto\"");
    }
  }
  if (body.contains("draws")) {
    const auto n = integer(body["draws"], "draws");
    if (n < 1) throw ValidationError("field 'draws': must be at least 1");
    opts.draws = static_cast<std::size_t>(n);
  }
  if (body.contains("seed")) opts.seed = seed(body["seed"]);
  if (opts.choice == EngineChoice::MonteCarlo && !opts.seed) throw MissingOptionError("seed");
  return opts;
}

inline EmpiricalSample<double> sample(const json& j, const std::string& name) {
  auto values = numbers(j, name);
  if (values.empty()) throw EmptyDataError("field '" + name + "': sample is empty");
  return EmpiricalSample<double>(std::move(values));
}

inline ForecastRecord record(const json& j, std::size_t index) {
  const std::string where = "records[" + std::to_string(index) + "]";
  if (!j.is_object()) throw SchemaError("field '" + where + "': expected an object");
  if (!j.contains("observed")) throw SchemaError("field '" + where + ".observed' is required");
  const double observed = number(j["observed"], where + ".observed");
  std::vector<Forecast> encodings;
  try {
    if (j.contains("pmf")) {
      if (!j["pmf"].is_object()) throw SchemaError("field '" + where + ".pmf': expected an object");
      std::vector<std::int64_t> support;
      std::vector<double> probs;
      std::map<std::int64_t, double> entries;
      for (const auto& [k, v] : j["pmf"].items()) {
        const auto value = io::detail::to_integer(k);
        if (!value) throw ValidationError("field '" + where + ".pmf': key '" + k + "' is not an integer");
        entries[*value] = number(v, where + ".pmf." + k);
      }
      for (const auto& [v, p] : entries) {
        support.push_back(v);
        probs.push_back(p);
      }
      encodings.emplace_back(DiscretePMF(std::move(support), std::move(probs)));
    }
    if (j.contains("sample")) encodings.emplace_back(sample(j["sample"], where + ".sample"));
    if (j.contains("percentiles")) {
      if (!j["percentiles"].is_object()) {
        throw SchemaError("field '" + where + ".percentiles': expected an object of percent: value");
      }
      std::map<double, std::int64_t> by_level;
      for (const auto& [k, v] : j["percentiles"].items()) {
        const auto pct = io::detail::to_number(k);
        if (!pct) throw SchemaError("field '" + where + ".percentiles': key '" + k + "' is not a percentage");
        by_level[*pct / 100.0] = integer(v, where + ".percentiles." + k);
      }
      encodings.emplace_back(io::pmf_from_percentiles(by_level));
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(where + ": " + e.what());
  }
  if (encodings.size() != 1) {
    throw SchemaError("field '" + where + "': exactly one of 'pmf', 'sample', 'percentiles' is required");
  }
  ForecastRecord rec{std::move(encodings.front()), observed, {}};
  if (j.contains("events")) {
    const auto& events = j["events"];
    if (!events.is_array()) throw SchemaError("field '" + where + ".events': expected a list");
    for (std::size_t e = 0; e < events.size(); ++e) {
      const std::string f = where + ".events[" + std::to_string(e) + "]";
      const double t = number(field(events[e], "threshold"), f + ".threshold");
      const double p = number(field(events[e], "probability"), f + ".probability");
      if (p < 0.0 || p > 1.0) throw ValidationError("field '" + f + ".probability': must lie in [0, 1]");
      rec.events.push_back({t, p});
    }
  }
  return rec;
}

}  // namespace detail

inline ScanRequest parse_scan_request(const json& body) {
  const auto& offers = detail::field(body, "offers");
  if (!offers.is_array() || offers.empty()) throw SchemaError("field 'offers': expected a non-empty list");
  ScanRequest req{detail::model(body), {}, detail::engine(body)};
  for (std::size_t i = 0; i < offers.size(); ++i) {
    const auto o = detail::integer(offers[i], "offers[" + std::to_string(i) + "]");
    if (o < 0) throw ValidationError("field 'offers[" + std::to_string(i) + "]': must be non-negative");
    req.offers.push_back(o);
  }
  return req;
}

inline ForecastRequest parse_forecast_request(const json& body) {
  const auto o = detail::integer(detail::field(body, "offers"), "offers");
  if (o < 0) throw ValidationError("field 'offers': must be non-negative");
  return {detail::model(body), o, detail::engine(body)};
}

inline BreakEvenRequest parse_break_even_request(const json& body) {
  const auto lo = detail::integer(detail::field(body, "min"), "min");
  const auto hi = detail::integer(detail::field(body, "max"), "max");
  if (lo < 0 || hi < lo) throw ValidationError("fields 'min'/'max': need 0 <= min <= max");
  return {detail::model(body), OfferRange{lo, hi}};
}

inline ProductRequest parse_product_request(const json& body) {
  const auto& user_field = detail::field(body, "user");
  const auto user = user_field.is_string() ? parse_user_type(user_field.get<std::string>()) : std::nullopt;
  if (!user) {
    throw SchemaError(
        "field 'user': expected LowStakes, GeneralAssessor, ChangeAssessor, RiskAvoider or DecisionTheorist");
  }
  ProductOptions opts;
  opts.alpha = detail::optional_number(body, "alpha");
  opts.observed = detail::optional_number(body, "observed");
  const auto under = detail::optional_number(body, "cost_under");
  const auto over = detail::optional_number(body, "cost_over");
  if (under && over) {
    opts.loss = LossSpec(*under, *over);
  } else if (*user == UserType::DecisionTheorist) {
    throw MissingOptionError(under ? "cost_over" : "cost_under");
  }
  if (body.contains("interval")) {
    const auto iv = detail::numbers(body["interval"], "interval");
    if (iv.size() != 2) throw SchemaError("field 'interval': expected [lo, hi]");
    opts.interval_lo = iv[0];
    opts.interval_hi = iv[1];
  }
  if (body.contains("model") == body.contains("sample")) {
    throw SchemaError("exactly one of 'model' or 'sample' is required");
  }
  if (body.contains("sample")) return {detail::sample(body["sample"], "sample"), *user, opts};
  const auto o = detail::integer(detail::field(body, "offers"), "offers");
  if (o < 0) throw ValidationError("field 'offers': must be non-negative");
  return {ModelSource{detail::model(body), o, detail::engine(body)}, *user, opts};
}

inline SummarizeRequest parse_summarize_request(const json& body) {
  SummarizeRequest req{detail::sample(detail::field(body, "sample"), "sample"), {}, kDefaultSuppression};
  if (body.contains("thresholds")) req.thresholds = detail::numbers(body["thresholds"], "thresholds");
  if (const auto s = detail::optional_number(body, "suppress")) req.suppress = *s;
  return req;
}

inline CalibrateRequest parse_calibrate_request(const json& body) {
  const auto& records = detail::field(body, "records");
  if (!records.is_array()) throw SchemaError("field 'records': expected a list");
  if (records.empty()) throw EmptyDataError("field 'records': no forecast records");
  CalibrateRequest req;
  for (std::size_t i = 0; i < records.size(); ++i) req.records.push_back(detail::record(records[i], i));
  if (body.contains("levels")) {
    const auto& levels = body["levels"];
    if (!levels.is_array()) throw SchemaError("field 'levels': expected a list of [lo, hi] pairs");
    req.options.levels.clear();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto pair = detail::numbers(levels[i], "levels[" + std::to_string(i) + "]");
      if (pair.size() != 2) throw SchemaError("field 'levels[" + std::to_string(i) + "]': expected [lo, hi]");
      req.options.levels.push_back({pair[0], pair[1]});
    }
  }
  if (body.contains("bins")) req.options.pit_bins = static_cast<std::size_t>(detail::integer(body["bins"], "bins"));
  if (body.contains("reliability_bins")) {
    req.options.reliability_bins =
        static_cast<std::size_t>(detail::integer(body["reliability_bins"], "reliability_bins"));
  }
  if (body.contains("event_thresholds")) {
    req.options.event_thresholds = detail::numbers(body["event_thresholds"], "event_thresholds");
  }
  if (body.contains("seed")) req.options.seed = detail::seed(body["seed"]);
  return req;
}

// ---------------------------------------------------------------------------
// Payloads

inline json seed_json(const std::optional<Seed>& seed) {
  return seed ? json(seed->value) : json(nullptr);
}

inline json engine_json(const EngineInfo& info) {
  return {{"kind", std::string(to_string(info.kind))}, {"draws", info.draws}, {"seed", seed_json(info.seed)}};
}

inline json engine_request_json(const EngineOptions& opts) {
  const char* choice = opts.choice == EngineChoice::Exact ? "exact" : opts.choice == EngineChoice::MonteCarlo ? "mc" : "auto";
  return {{"kind", choice}, {"draws", opts.draws}, {"seed", seed_json(opts.seed)}};
}

inline json levels_json() {
  json l = json::array();
  for (double q : kScanLevels) l.push_back(q);
  return l;
}

inline json scan_row_json(const ScanRow& row) {
  return {{"offers", row.offers},
          {"percentiles", row.percentiles},
          {"p_nonpos", row.p_nonpositive},
          {"label", std::string(to_string(row.label))},
          {"engine", engine_json(row.engine)}};
}

inline json scan(const ScanRequest& req) {
  json rows = json::array();
  for (const auto& row : quotaplan::scan(req.model, req.offers, req.engine)) rows.push_back(scan_row_json(row));
  return {{"schema_version", kPayloadSchemaVersion},
          {"engine", engine_request_json(req.engine)},
          {"levels", levels_json()},
          {"rows", rows}};
}

inline json distribution_json(const LostPositionsForecast& f) {
  return std::visit(
      [](const auto& d) -> json {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, DiscretePMF>) {
          return {{"kind", "pmf"},
                  {"support", std::vector<std::int64_t>(d.support().begin(), d.support().end())},
                  {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
        } else {
          std::vector<std::int64_t> values;
          std::vector<std::size_t> counts;
          for (const auto& [v, c] : d.histogram()) {
            values.push_back(v);
            counts.push_back(c);
          }
          return {{"kind", "histogram"}, {"values", values}, {"counts", counts}, {"draws", d.size()}};
        }
      },
      f.distribution);
}

inline json forecast(const ForecastRequest& req) {
  const auto f = lost_positions(req.model, OfferScenario{req.offers}, req.engine);
  const auto row = scan_row(f);
  return {{"schema_version", kPayloadSchemaVersion},
          {"offers", req.offers},
          {"engine", engine_json(f.engine)},
          {"distribution", distribution_json(f)},
          {"mean", f.mean()},
          {"levels", levels_json()},
          {"percentiles", row.percentiles},
          {"p_nonpos", row.p_nonpositive},
          {"label", std::string(to_string(row.label))}};
}

inline json break_even(const BreakEvenRequest& req) {
  const auto result = quotaplan::break_even(req.model, req.range);
  json j{{"schema_version", kPayloadSchemaVersion},
         {"engine", engine_json(EngineInfo{})},
         {"range", {{"min", req.range.min}, {"max", req.range.max}}},
         {"found", result.has_value()}};
  if (result) {
    j["offers"] = result->offers;
    j["p_nonpos"] = result->p_nonpositive;
    j["label"] = std::string(to_string(stance_label(result->p_nonpositive)));
  } else {
    j["offers"] = nullptr;
    j["p_nonpos"] = nullptr;
    j["label"] = nullptr;
  }
  return j;
}

inline json product_json(const DecisionProduct& product) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, PointForecast>) {
          return {{"type", "Point"}, {"value", p.value}};
        } else if constexpr (std::is_same_v<P, IntervalForecast>) {
          return {{"type", "Interval"}, {"lo", p.lo}, {"hi", p.hi}, {"level", p.level}};
        } else if constexpr (std::is_same_v<P, BoundForecast>) {
          return {{"type", "Bound"}, {"value", p.value}, {"alpha", p.alpha}, {"wording", "precautionary lower bound"}};
        } else if constexpr (std::is_same_v<P, ChangeAlarm>) {
          return {{"type", "Alarm"},
                  {"status", std::string(to_string(p.status))},
                  {"interval", {p.lo, p.hi}},
                  {"observed", p.observed}};
        } else {
          return {{"type", "OptimalPoint"}, {"value", p.value}, {"tau", p.tau}};
        }
      },
      product);
}

inline json product(const ProductRequest& req) {
  json engine;
  DecisionProduct result = std::visit(
      [&](const auto& src) -> DecisionProduct {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, ModelSource>) {
          const auto f = lost_positions(src.model, OfferScenario{src.offers}, src.engine);
          engine = engine_json(f.engine);
          return std::visit([&](const auto& d) { return product_for_user(d, req.user, req.options); },
                            f.distribution);
        } else {
          engine = {{"kind", "empirical"}, {"draws", src.size()}, {"seed", nullptr}};
          return product_for_user(src, req.user, req.options);
        }
      },
      req.source);
  json j{{"schema_version", kPayloadSchemaVersion},
         {"engine", engine},
         {"user", std::string(to_string(req.user))},
         {"product", product_json(result)}};
  if (const auto* m = std::get_if<ModelSource>(&req.source)) j["offers"] = m->offers;
  return j;
}

inline json summarize(const SummarizeRequest& req) {
  const auto s = public_summary(req.sample, req.thresholds, req.suppress);
  json ex = json::array();
  for (const auto& e : s.exceedances) {
    ex.push_back({{"threshold", e.threshold},
                  {"probability", e.probability ? json(*e.probability) : json(nullptr)},
                  {"suppressed", !e.probability.has_value()}});
  }
  return {{"schema_version", kPayloadSchemaVersion},
          {"engine", {{"kind", "empirical"}, {"draws", req.sample.size()}, {"seed", nullptr}}},
          {"p10", s.p10},
          {"p50", s.p50},
          {"p90", s.p90},
          {"suppress", req.suppress},
          {"exceedances", ex}};
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json calibrate(const CalibrateRequest& req) {
  const auto report = quotaplan::calibrate(req.records, req.options);
  json coverage = json::array();
  for (const auto& c : report.coverage) {
    coverage.push_back({{"lo", c.levels.lo},
                        {"hi", c.levels.hi},
                        {"nominal", c.nominal},
                        {"attainable", c.attainable},
                        {"empirical", c.empirical},
                        {"mean_width", c.mean_width}});
  }
  json rel = json::array();
  for (const auto& b : report.reliability) {
    rel.push_back({{"lo", b.lo},
                   {"hi", b.hi},
                   {"center", b.center},
                   {"count", b.count},
                   {"mean_probability", optional_json(b.mean_probability)},
                   {"observed_frequency", optional_json(b.observed_frequency)}});
  }
  return {{"schema_version", kPayloadSchemaVersion},
          {"engine", {{"kind", "randomized-pit"}, {"draws", 0}, {"seed", req.options.seed.value}}},
          {"n_records", report.n_records},
          {"coverage", coverage},
          {"pit", {{"counts", report.pit_counts}, {"chi_square", report.pit_chi_square}}},
          {"n_events", report.n_events},
          {"reliability", rel}};
}

inline json model_summary(const io::LoadedModel& loaded) {
  return {{"schema_version", kPayloadSchemaVersion},
          {"name", loaded.name},
          {"model", io::model_to_json(loaded.model, loaded.name)},
          {"acceptance", {{"pi", loaded.model.acceptance.pi()},
                          {"provenance", std::string(to_string(loaded.model.acceptance.provenance()))}}},
          {"derivation", loaded.log}};
}

}  // namespace quotaplan::api
