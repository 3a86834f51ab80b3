// Dedicated acceptance runner: one pass/fail line per criterion, nonzero exit
// when anything fails.
#include <cstdio>
#include <cstdlib>

#include "dimlab/acceptance.hpp"

int main() {
  dimlab::AcceptanceOptions opt;
  opt.seed = 42;
  if (const char* env = std::getenv("DIMLAB_WORKERS")) opt.workers = std::atoi(env);
  const auto results = dimlab::run_acceptance(opt);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-45s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
