#pragma once

// Stateless JSON service. Service::handle maps (method, path, body) to a
// response without touching any transport, so it runs the same under the
// HTTP server and in tests.

#include <regex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "quotaplan/api.hpp"
#include "quotaplan/errors.hpp"
#include "quotaplan/io.hpp"

namespace quotaplan::service {

using nlohmann::json;

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// 400 for malformed or invalid requests, 422 for well-formed requests whose
/// data cannot be used (empty histories, inconsistent counts, oversized
/// supports).
inline int status_for(const Error& e) {
  if (dynamic_cast<const EmptyDataError*>(&e) || dynamic_cast<const DataError*>(&e) ||
      dynamic_cast<const CapacityError*>(&e)) {
    return 422;
  }
  return 400;
}

inline Response error_response(int status, std::string_view kind, const std::string& message,
                               std::string field = {}) {
  if (field.empty()) {
    static const std::regex field_re("field '([^']+)'");
    std::smatch m;
    if (std::regex_search(message, m, field_re)) field = m[1];
  }
  json err{{"kind", kind}, {"message", message}};
  err["field"] = field.empty() ? json(nullptr) : json(field);
  return {status, json{{"error", err}}.dump()};
}

class Service {
 public:
  Response handle(std::string_view method, std::string_view path, std::string_view body) const {
    try {
      if (path == "/v1/health") {
        if (method != "GET") return error_response(405, "MethodNotAllowed", "use GET");
        return {200, "ok", "text/plain"};
      }
      const auto route = route_for(path);
      if (!route) return error_response(404, "NotFound", "no endpoint " + std::string(path));
      if (method != "POST") return error_response(405, "MethodNotAllowed", "use POST");
      const json request = io::parse_json(body, "request body");
      return {200, (this->*route)(request).dump()};
    } catch (const MissingOptionError& e) {
      return error_response(400, e.kind(), e.what(), e.option());
    } catch (const Error& e) {
      return error_response(status_for(e), e.kind(), e.what());
    } catch (const json::exception& e) {
      return error_response(400, "SchemaError", e.what());
    } catch (const std::exception& e) {
      return error_response(500, "InternalError", e.what());
    }
  }

 private:
  using Handler = json (Service::*)(const json&) const;

  static Handler route_for(std::string_view path) {
    if (path == "/v1/scan") return &Service::scan;
    if (path == "/v1/forecast") return &Service::forecast;
    if (path == "/v1/break-even") return &Service::break_even;
    if (path == "/v1/product") return &Service::product;
    if (path == "/v1/summarize") return &Service::summarize;
    if (path == "/v1/calibrate") return &Service::calibrate;
    if (path == "/v1/model") return &Service::model;
    return nullptr;
  }

  json scan(const json& b) const { return api::scan(api::parse_scan_request(b)); }
  json forecast(const json& b) const { return api::forecast(api::parse_forecast_request(b)); }
  json break_even(const json& b) const { return api::break_even(api::parse_break_even_request(b)); }
  json product(const json& b) const { return api::product(api::parse_product_request(b)); }
  json summarize(const json& b) const { return api::summarize(api::parse_summarize_request(b)); }
  json calibrate(const json& b) const { return api::calibrate(api::parse_calibrate_request(b)); }
  // Upload convenience: the body is a model file; returns the assembled model.
  json model(const json& b) const { return api::model_summary(io::model_from_json(b)); }
};

}  // namespace quotaplan::service
