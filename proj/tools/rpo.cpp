// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rpo/cli.hpp"

int main(int argc, char** argv) {
  std::optional<std::string> env_seed;
  if (const char* s = std::getenv("RPO_SEED")) env_seed = s;
  return rpo::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr, env_seed);
}
