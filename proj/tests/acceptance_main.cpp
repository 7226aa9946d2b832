#include "sdof/acceptance.hpp"

#include <iostream>

int main() {
  sdof::AcceptanceOptions opt;
  opt.on_result = [](const sdof::CriterionResult& r) { std::cout << sdof::format_result(r) << std::endl; };
  const auto results = sdof::run_acceptance(opt);
  const bool ok = sdof::all_passed(results);
  std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return ok ? 0 : 1;
}
