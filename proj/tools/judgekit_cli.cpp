#include <string>
#include <vector>

#include "judgekit/cli.hpp"

int main(int argc, char** argv) {
  return judgekit::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
