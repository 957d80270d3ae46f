#include <iostream>

#include "l2ext/cli.hpp"

int main(int argc, char** argv) {
  l2ext::RunConfig cfg;
  if (auto code = l2ext::parse_args(argc, argv, cfg, std::cout, std::cerr)) return *code;
  return l2ext::run(cfg, std::cout, std::cerr);
}
