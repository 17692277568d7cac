#include <vector>

#include "hallugauge/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hg::dispatch(args);
}
