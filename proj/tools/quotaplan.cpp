#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "quotaplan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  quotaplan::cli::Environment env;
  env.color = ::isatty(STDOUT_FILENO) && std::getenv("QUOTAPLAN_NO_COLOR") == nullptr;
  return quotaplan::cli::run(args, std::cout, std::cerr, env);
}
