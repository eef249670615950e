#include <iostream>
#include <string>
#include <vector>

#include "rdfr/cli.h"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv, argv + argc);
  int code = rdfr::runCli(args, std::cout, std::cerr);
  std::cout.flush();
  return code;
}
