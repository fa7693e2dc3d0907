#pragma once

// cpp-httplib binding for Service.

#include <cstdlib>
#include <optional>
#include <string>

#include <httplib.h>

#include "quotaplan/service.hpp"

namespace quotaplan::service {

struct Address {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// "host:port", ":port" or "port".
inline std::optional<Address> parse_address(const std::string& text) {
  Address a;
  const auto colon = text.rfind(':');
  std::string port = colon == std::string::npos ? text : text.substr(colon + 1);
  if (colon != std::string::npos && colon > 0) a.host = text.substr(0, colon);
  try {
    std::size_t used = 0;
    a.port = std::stoi(port, &used);
    if (used != port.size() || a.port < 0 || a.port > 65535) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return a;
}

inline void install(httplib::Server& server, const Service& svc, const std::string& cors_origin = "*") {
  server.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto forward = [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto out = svc.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(R"(/v1/.*)", forward);
  server.Post(R"(/v1/.*)", forward);
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

}  // namespace quotaplan::service
