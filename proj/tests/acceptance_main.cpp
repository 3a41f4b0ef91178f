// Runs the acceptance suite; one line per criterion, nonzero exit when any fails.

#include <cstdio>

#include "bopp/acceptance.hpp"

int main() {
  bool ok = true;
  bopp::run_acceptance({}, [&](const bopp::CriterionResult& r) {
    std::printf("%s\n", bopp::format_result(r).c_str());
    for (const auto& n : r.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  });
  std::printf("%s\n", ok ? "acceptance: all criteria pass" : "acceptance: FAILED");
  return ok ? 0 : 1;
}
