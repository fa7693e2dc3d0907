#pragma once

#include <filesystem>
#include <string>

#include "quotaplan/calibration.hpp"
#include "quotaplan/io.hpp"
#include "quotaplan/planner.hpp"
#include "quotaplan/rng.hpp"

namespace qptest {

inline std::filesystem::path data_dir() { return QP_TEST_DATA; }

inline std::filesystem::path fixture(const std::string& name) {
  return data_dir() / "fixtures" / (name + ".json");
}

inline const char* const kFixtures[] = {"department", "small_program", "beta_prior", "pmf_form",
                                        "volatile_grants"};

inline quotaplan::PlanningModel load(const std::string& name) {
  return quotaplan::io::load_model(fixture(name)).model;
}

/// Self-consistent records: forecasts are the department fixture's Y at
/// offers 10..30 in rotation, each observation drawn from its own forecast.
inline std::vector<quotaplan::ForecastRecord> synthetic_records(std::size_t n, quotaplan::Seed seed) {
  using namespace quotaplan;
  const auto model = load("department");
  std::vector<DiscretePMF> forecasts;
  for (std::int64_t o = 10; o <= 30; ++o) {
    forecasts.push_back(std::get<DiscretePMF>(lost_positions_exact(model, {o}).distribution));
  }
  Xoshiro256 rng(seed);
  std::vector<ForecastRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = forecasts[i % forecasts.size()];
    const auto y = f.support()[f.inverse_cdf_index(rng.uniform())];
    records.push_back({f, static_cast<double>(y), {}});
  }
  return records;
}

}  // namespace qptest
