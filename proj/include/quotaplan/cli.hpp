#pragma once

// Command-line front end. run() takes the argument list and output streams
// so the whole command surface can be exercised in-process.
//
// Exit codes: 0 success, 2 usage, 3 data or validation, 4 internal.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quotaplan/api.hpp"
#include "quotaplan/errors.hpp"
#include "quotaplan/io.hpp"

namespace quotaplan::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

struct Environment {
  /// ANSI styling of stance labels; the binary disables it when stdout is
  /// not a terminal or QUOTAPLAN_NO_COLOR is set.
  bool color = false;
};

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
  if (std::isfinite(v) && std::floor(v) == v && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

inline std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string styled_label(Stance s, bool color) {
  const std::string text(to_string(s));
  if (!color) return text;
  const char* code = "";
  switch (s) {
    case Stance::VeryConservative: code = "\033[34m"; break;
    case Stance::Conservative: code = "\033[36m"; break;
    case Stance::BreakEven: code = "\033[1m"; break;
    case Stance::Bold: code = "\033[33m"; break;
    case Stance::VeryBold: code = "\033[31m"; break;
  }
  return code + text + "\033[0m";
}

inline std::string engine_text(const json& engine) {
  const auto kind = engine["kind"].get<std::string>();
  if (kind == "exact") return "exact convolution";
  if (kind == "mc") {
    return "Monte Carlo, " + std::to_string(engine["draws"].get<std::size_t>()) + " draws, seed " +
           std::to_string(engine["seed"].get<std::uint64_t>());
  }
  return kind;
}

inline std::vector<double> parse_numbers(const std::string& list, const char* flag) {
  std::vector<double> out;
  for (const auto& item : io::detail::split(list, ',')) {
    const auto v = io::detail::to_number(item);
    if (!v) throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

inline std::vector<std::int64_t> parse_offer_list(const std::string& list) {
  std::vector<std::int64_t> out;
  for (const auto& item : io::detail::split(list, ',')) {
    const auto v = io::detail::to_integer(item);
    if (!v || *v < 0) throw UsageError("--offers: '" + item + "' is not a non-negative integer");
    out.push_back(*v);
  }
  return out;
}

inline LevelPair parse_level_pair(const std::string& text, const char* flag) {
  const auto parts = io::detail::split(text, ':');
  const auto lo = parts.size() == 2 ? io::detail::to_number(parts[0]) : std::nullopt;
  const auto hi = parts.size() == 2 ? io::detail::to_number(parts[1]) : std::nullopt;
  if (!lo || !hi || !(*lo > 0.0 && *lo < *hi && *hi < 1.0)) {
    throw UsageError(std::string(flag) + ": expected lo:hi with 0 < lo < hi < 1, got '" + text + "'");
  }
  return {*lo, *hi};
}

struct EngineFlags {
  std::string engine = "auto";
  std::size_t draws = 100'000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--engine", engine, "exact, mc or auto")
        ->check(CLI::IsMember({"exact", "mc", "auto"}))
        ->capture_default_str();
    cmd->add_option("--draws", draws, "Monte Carlo draws")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", seed, "Monte Carlo seed (required for mc)");
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
  }

  EngineOptions options() const {
    EngineOptions o;
    o.choice = engine == "exact" ? EngineChoice::Exact : engine == "mc" ? EngineChoice::MonteCarlo : EngineChoice::Auto;
    o.draws = draws;
    if (seed) o.seed = Seed{*seed};
    o.threads = threads;
    if (o.choice == EngineChoice::MonteCarlo && !o.seed) throw MissingOptionError("--seed");
    return o;
  }
};

// ---------------------------------------------------------------------------
// Table renderers

inline void render_scan(const json& payload, std::ostream& out, bool color) {
  out << "#Offers" << pad_left("10%", 7) << pad_left("33%", 7) << pad_left("50%", 7) << pad_left("67%", 7)
      << pad_left("90%", 7) << "  Description\n";
  bool negative = false;
  std::set<std::string> engines;
  for (const auto& row : payload["rows"]) {
    out << pad_left(std::to_string(row["offers"].get<std::int64_t>()), 7);
    for (const auto& v : row["percentiles"]) {
      negative = negative || v.get<std::int64_t>() < 0;
      out << pad_left(std::to_string(v.get<std::int64_t>()), 7);
    }
    const auto label = row["label"].get<std::string>();
    Stance stance = Stance::BreakEven;
    for (auto s : {Stance::VeryConservative, Stance::Conservative, Stance::BreakEven, Stance::Bold, Stance::VeryBold}) {
      if (label == to_string(s)) stance = s;
    }
    out << "  " << styled_label(stance, color) << "\n";
    engines.insert(engine_text(row["engine"]));
  }
  if (negative) {
    out << "\nNegative values count accepted students who could not be funded from current sources.\n";
  }
  for (const auto& e : engines) out << "Engine: " << e << "\n";
}

inline void render_forecast(const json& p, std::ostream& out, bool color) {
  out << "Offers: " << p["offers"].get<std::int64_t>() << "\n";
  out << "Engine: " << engine_text(p["engine"]) << "\n";
  out << "P(Y <= 0) = " << format_prob(p["p_nonpos"].get<double>()) << "  ("
      << styled_label(stance_label(p["p_nonpos"].get<double>()), color) << ")\n";
  out << "Mean = " << format_number(p["mean"].get<double>()) << "\n";
  out << "Percentiles:";
  for (std::size_t i = 0; i < kScanLevels.size(); ++i) {
    out << "  " << static_cast<int>(std::lround(kScanLevels[i] * 100)) << "%=" << p["percentiles"][i].get<std::int64_t>();
  }
  out << "\n\n";
  const auto& d = p["distribution"];
  if (d["kind"] == "pmf") {
    out << pad_left("Y", 6) << "  Probability\n";
    for (std::size_t i = 0; i < d["support"].size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", d["probs"][i].get<double>());
      out << pad_left(std::to_string(d["support"][i].get<std::int64_t>()), 6) << "  " << buf << "\n";
    }
  } else {
    const auto draws = static_cast<double>(d["draws"].get<std::size_t>());
    out << pad_left("Y", 6) << pad_left("Count", 9) << "  Frequency\n";
    for (std::size_t i = 0; i < d["values"].size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(d["counts"][i].get<std::size_t>()) / draws);
      out << pad_left(std::to_string(d["values"][i].get<std::int64_t>()), 6)
          << pad_left(std::to_string(d["counts"][i].get<std::size_t>()), 9) << "  " << buf << "\n";
    }
  }
}

inline void render_break_even(const json& p, std::ostream& out) {
  const auto lo = p["range"]["min"].get<std::int64_t>();
  const auto hi = p["range"]["max"].get<std::int64_t>();
  if (!p["found"].get<bool>()) {
    out << "Break-even offers: not found in [" << lo << ", " << hi << "]\n";
    return;
  }
  out << "Break-even offers: " << p["offers"].get<std::int64_t>() << "\n";
  out << "P(Y <= 0) = " << format_prob(p["p_nonpos"].get<double>()) << "\n";
}

inline void render_summary(const json& p, std::ostream& out) {
  out << "10th percentile: " << format_number(p["p10"].get<double>()) << "\n";
  out << "50th percentile: " << format_number(p["p50"].get<double>()) << "\n";
  out << "90th percentile: " << format_number(p["p90"].get<double>()) << "\n";
  if (p["exceedances"].empty()) return;
  out << "\n" << pad_left("Threshold", 10) << "  P(X > threshold)\n";
  for (const auto& e : p["exceedances"]) {
    out << pad_left(format_number(e["threshold"].get<double>()), 10) << "  ";
    if (!e["suppressed"].get<bool>()) out << format_prob(e["probability"].get<double>());
    out << "\n";
  }
  out << "(probabilities below " << format_number(p["suppress"].get<double>()) << " are left blank)\n";
}

inline void render_calibration(const json& p, std::ostream& out) {
  out << "Records: " << p["n_records"].get<std::size_t>() << "\n\n";
  out << pad_right("Interval", 12) << pad_left("Nominal", 9) << pad_left("Attainable", 12) << pad_left("Empirical", 11)
      << pad_left("Mean width", 12) << "\n";
  for (const auto& c : p["coverage"]) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.2f-%.2f", c["lo"].get<double>(), c["hi"].get<double>());
    out << pad_right(buf, 12);
    std::snprintf(buf, sizeof buf, "%9.4f%12.4f%11.4f%12.4f", c["nominal"].get<double>(), c["attainable"].get<double>(),
                  c["empirical"].get<double>(), c["mean_width"].get<double>());
    out << buf << "\n";
  }
  out << "\nPIT histogram (" << p["pit"]["counts"].size() << " bins, chi-square "
      << format_number(std::round(p["pit"]["chi_square"].get<double>() * 1000) / 1000) << "):";
  for (const auto& c : p["pit"]["counts"]) out << " " << c.get<std::size_t>();
  out << "\n";
  if (p["reliability"].empty()) return;
  out << "\nReliability (" << p["n_events"].get<std::size_t>() << " event forecasts)\n";
  out << pad_right("Bin", 12) << pad_left("Count", 8) << pad_left("Mean prob", 11) << pad_left("Observed", 10) << "\n";
  for (const auto& b : p["reliability"]) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f-%.2f", b["lo"].get<double>(), b["hi"].get<double>());
    out << pad_right(buf, 12) << pad_left(std::to_string(b["count"].get<std::size_t>()), 8);
    if (b["count"].get<std::size_t>() > 0) {
      out << pad_left(format_prob(b["mean_probability"].get<double>()), 11)
          << pad_left(format_prob(b["observed_frequency"].get<double>()), 10);
    }
    out << "\n";
  }
}

inline std::string percent(double level) {
  return format_number(std::round(level * 1000) / 10) + "%";
}

inline void render_product(const json& p, std::ostream& out) {
  const auto& prod = p["product"];
  const auto type = prod["type"].get<std::string>();
  out << "User type: " << p["user"].get<std::string>() << "\n";
  if (type == "Point") {
    out << "Point forecast (median): " << format_number(prod["value"].get<double>()) << "\n";
  } else if (type == "Interval") {
    out << percent(prod["level"].get<double>()) << " central interval: [" << format_number(prod["lo"].get<double>())
        << ", " << format_number(prod["hi"].get<double>()) << "]\n";
  } else if (type == "Bound") {
    out << "Precautionary lower bound (" << percent(prod["alpha"].get<double>())
        << " percentile): " << format_number(prod["value"].get<double>()) << "\n";
  } else if (type == "Alarm") {
    const auto status = prod["status"].get<std::string>();
    out << "Observed " << format_number(prod["observed"].get<double>()) << " against projected range ["
        << format_number(prod["interval"][0].get<double>()) << ", " << format_number(prod["interval"][1].get<double>())
        << "]: ";
    if (status == "InRange") {
      out << "in range, no alarm\n";
    } else {
      out << "ALARM (" << (status == "Above" ? "above" : "below") << " range)\n";
    }
  } else {
    out << "Loss-optimal point forecast (quantile at tau = " << format_number(prod["tau"].get<double>())
        << "): " << format_number(prod["value"].get<double>()) << "\n";
  }
}

inline io::LoadedModel load_model_logged(const std::string& path, bool verbose, std::ostream& err) {
  auto loaded = io::load_model(path);
  if (verbose) {
    for (const auto& line : loaded.log) err << "[model] " << line << "\n";
  }
  return loaded;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const Environment& env = {}) {
  using namespace detail;
  CLI::App app{"Probabilistic admissions planning and forecast decision support", "quotaplan"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log model derivation steps to stderr");
  std::string format = "table";
  auto add_format = [&format](CLI::App* cmd) {
    cmd->add_option("--format", format, "table or machine")->check(CLI::IsMember({"table", "machine"}))->capture_default_str();
  };

  // scan
  auto* scan = app.add_subcommand("scan", "percentiles and stance labels for several offer counts");
  std::string scan_model, scan_offers;
  EngineFlags scan_engine;
  scan->add_option("model", scan_model, "model specification file")->required();
  scan->add_option("--offers", scan_offers, "comma-separated offer counts")->required();
  scan_engine.attach(scan);
  add_format(scan);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "distribution of lost positions for one offer count");
  std::string sim_model;
  std::int64_t sim_offers = 0;
  EngineFlags sim_engine;
  simulate->add_option("model", sim_model, "model specification file")->required();
  simulate->add_option("--offers", sim_offers, "number of offers")->required()->check(CLI::NonNegativeNumber);
  sim_engine.attach(simulate);
  add_format(simulate);

  // break-even
  auto* breakeven = app.add_subcommand("break-even", "smallest offer count with P(Y <= 0) >= 1/2");
  std::string be_model;
  std::int64_t be_min = 0;
  std::int64_t be_max = 100;
  breakeven->add_option("model", be_model, "model specification file")->required();
  breakeven->add_option("--min", be_min, "smallest offer count searched")->check(CLI::NonNegativeNumber)->capture_default_str();
  breakeven->add_option("--max", be_max, "largest offer count searched")->check(CLI::NonNegativeNumber)->capture_default_str();
  add_format(breakeven);

  // summarize
  auto* summarize = app.add_subcommand("summarize", "percentiles and exceedance probabilities of a sample");
  std::string sum_path, sum_thresholds;
  double sum_suppress = kDefaultSuppression;
  summarize->add_option("sample", sum_path, "sample file, one value per line")->required();
  summarize->add_option("--thresholds", sum_thresholds, "comma-separated thresholds");
  summarize->add_option("--suppress", sum_suppress, "blank probabilities below this level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_format(summarize);

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "coverage, PIT, reliability and sharpness of past forecasts");
  std::string cal_path;
  std::vector<std::string> cal_levels{"0.1:0.9"};
  std::size_t cal_bins = 10;
  std::size_t cal_rel_bins = 10;
  std::string cal_events;
  std::uint64_t cal_seed = 0;
  calibrate->add_option("records", cal_path, "forecast records table")->required();
  calibrate->add_option("--levels", cal_levels, "central interval levels lo:hi")->delimiter(',')->capture_default_str();
  calibrate->add_option("--bins", cal_bins, "PIT histogram bins")->check(CLI::PositiveNumber)->capture_default_str();
  calibrate->add_option("--reliability-bins", cal_rel_bins, "reliability table bins")->check(CLI::PositiveNumber)->capture_default_str();
  calibrate->add_option("--event-thresholds", cal_events, "derive event forecasts P(X > t) at these thresholds");
  calibrate->add_option("--seed", cal_seed, "seed for randomized PIT")->capture_default_str();
  add_format(calibrate);

  // product
  auto* product = app.add_subcommand("product", "decision product for one type of user");
  std::string prod_path, prod_user, prod_interval = "0.1:0.9";
  std::optional<double> prod_alpha, prod_under, prod_over, prod_observed;
  std::optional<std::int64_t> prod_offers;
  EngineFlags prod_engine;
  product->add_option("source", prod_path, "model specification (.json) or sample file")->required();
  product->add_option("--user", prod_user, "LowStakes, GeneralAssessor, ChangeAssessor, RiskAvoider, DecisionTheorist")
      ->required()
      ->check(CLI::IsMember({"LowStakes", "GeneralAssessor", "ChangeAssessor", "RiskAvoider", "DecisionTheorist"}));
  product->add_option("--alpha", prod_alpha, "quantile level for RiskAvoider")->check(CLI::Range(0.0, 1.0));
  product->add_option("--cost-under", prod_under, "cost per unit of underestimate");
  product->add_option("--cost-over", prod_over, "cost per unit of overestimate");
  product->add_option("--observed", prod_observed, "new observation for ChangeAssessor");
  product->add_option("--interval", prod_interval, "central interval levels lo:hi")->capture_default_str();
  product->add_option("--offers", prod_offers, "offer count (model sources)")->check(CLI::NonNegativeNumber);
  prod_engine.attach(product);
  add_format(product);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const bool machine = format == "machine";
  try {
    json payload;
    if (*scan) {
      const auto offers = parse_offer_list(scan_offers);
      if (offers.empty()) throw UsageError("--offers: empty list");
      const auto engine = scan_engine.options();
      payload = api::scan({load_model_logged(scan_model, verbose, err).model, offers, engine});
      if (!machine) render_scan(payload, out, env.color);
    } else if (*simulate) {
      const auto engine = sim_engine.options();
      payload = api::forecast({load_model_logged(sim_model, verbose, err).model, sim_offers, engine});
      if (!machine) render_forecast(payload, out, env.color);
    } else if (*breakeven) {
      if (be_max < be_min) throw UsageError("--max must not be below --min");
      payload = api::break_even({load_model_logged(be_model, verbose, err).model, OfferRange{be_min, be_max}});
      if (!machine) render_break_even(payload, out);
    } else if (*summarize) {
      api::SummarizeRequest req{io::load_sample(sum_path), {}, sum_suppress};
      if (!sum_thresholds.empty()) req.thresholds = parse_numbers(sum_thresholds, "--thresholds");
      payload = api::summarize(req);
      if (!machine) render_summary(payload, out);
    } else if (*calibrate) {
      api::CalibrateRequest req;
      req.options.levels.clear();
      for (const auto& l : cal_levels) req.options.levels.push_back(parse_level_pair(l, "--levels"));
      req.options.pit_bins = cal_bins;
      req.options.reliability_bins = cal_rel_bins;
      if (!cal_events.empty()) req.options.event_thresholds = parse_numbers(cal_events, "--event-thresholds");
      req.options.seed = Seed{cal_seed};
      req.records = io::load_forecast_records(cal_path);
      payload = api::calibrate(req);
      if (!machine) render_calibration(payload, out);
    } else if (*product) {
      const UserType user = *parse_user_type(prod_user);
      ProductOptions options;
      options.alpha = prod_alpha;
      options.observed = prod_observed;
      const auto iv = parse_level_pair(prod_interval, "--interval");
      options.interval_lo = iv.lo;
      options.interval_hi = iv.hi;
      if (user == UserType::RiskAvoider) {
        if (!prod_alpha) throw MissingOptionError("--alpha");
        if (!(*prod_alpha > 0.0 && *prod_alpha < 1.0)) throw UsageError("--alpha must lie strictly between 0 and 1");
      }
      if (user == UserType::ChangeAssessor && !prod_observed) throw MissingOptionError("--observed");
      if (prod_under || prod_over || user == UserType::DecisionTheorist) {
        if (!prod_under) throw MissingOptionError("--cost-under");
        if (!prod_over) throw MissingOptionError("--cost-over");
        if (!(*prod_under > 0.0 && *prod_over > 0.0)) throw UsageError("costs must be strictly positive");
        options.loss = LossSpec(*prod_under, *prod_over);
      }
      if (std::filesystem::path(prod_path).extension() == ".json") {
        if (!prod_offers) throw MissingOptionError("--offers");
        const auto engine = prod_engine.options();
        payload = api::product({api::ModelSource{load_model_logged(prod_path, verbose, err).model, *prod_offers, engine},
                                user, options});
      } else {
        payload = api::product({io::load_sample(prod_path), user, options});
      }
      if (!machine) render_product(payload, out);
    }
    if (machine) out << payload.dump(2) << "\n";
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const MissingOptionError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << e.kind() << "): " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace quotaplan::cli
