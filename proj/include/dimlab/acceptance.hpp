#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimlab/report.hpp"

namespace dimlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 42;
  int workers = 0;
};

// Runs the ten acceptance criteria; every tolerance is pinned in the
// implementation. Results come back in criterion order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

Json acceptance_report(const std::vector<CriterionResult>& results,
                       const AcceptanceOptions& opt);

}  // namespace dimlab
