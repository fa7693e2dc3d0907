// HTTP front end: quotaplan-server [--addr host:port] [--cors-origin origin]
// The address defaults to $QUOTAPLAN_ADDR, then 127.0.0.1:8080.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "quotaplan/service_http.hpp"

int main(int argc, char** argv) {
  CLI::App app{"JSON service for admissions planning and forecast products", "quotaplan-server"};
  std::string addr = std::getenv("QUOTAPLAN_ADDR") ? std::getenv("QUOTAPLAN_ADDR") : "127.0.0.1:8080";
  std::string cors = "*";
  app.add_option("--addr", addr, "bind address host:port")->capture_default_str();
  app.add_option("--cors-origin", cors, "allowed browser origin")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const auto address = quotaplan::service::parse_address(addr);
  if (!address) {
    std::cerr << "invalid address '" << addr << "'\n";
    return 2;
  }
  quotaplan::service::Service service;
  httplib::Server server;
  quotaplan::service::install(server, service, cors);
  std::cerr << "listening on " << address->host << ":" << address->port << "\n";
  if (!server.listen(address->host, address->port)) {
    std::cerr << "cannot bind " << address->host << ":" << address->port << "\n";
    return 4;
  }
  return 0;
}
