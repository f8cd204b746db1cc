#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  const auto parsed = mnc::cli::parse_args(argc, argv, std::cout, std::cerr);
  if (!parsed.config) return parsed.exit_code;
  return mnc::cli::run_batch(*parsed.config, std::cout, std::cerr);
}
