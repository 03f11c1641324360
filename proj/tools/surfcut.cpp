// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include "surfcut/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return surfcut::run_cli(args, std::cout, std::cerr);
}
