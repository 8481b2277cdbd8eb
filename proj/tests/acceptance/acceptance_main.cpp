// Runs every acceptance criterion at full size and prints one line per criterion.
#include <cstdlib>
#include <iostream>

#include "gsnrf/validation.hpp"

int main(int argc, char** argv) {
  gsnrf::ValidationOptions options;
  if (argc > 1) options.seed = std::strtoull(argv[1], nullptr, 10);
  const auto results = gsnrf::run_acceptance(options, &std::cout);
  std::size_t passed = 0, infeasible = 0;
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    infeasible += r.known_infeasible ? 1 : 0;
  }
  std::cout << passed << "/" << results.size() << " criteria passed";
  if (infeasible > 0) std::cout << ", " << infeasible << " failed only in a known-infeasible part";
  std::cout << "\n";
  // Known-infeasible failures are reported above but do not fail the test run.
  return passed + infeasible == results.size() ? 0 : 1;
}
