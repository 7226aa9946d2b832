#pragma once

#include "sdof/schemes.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sdof {

enum class CriterionStatus : std::uint8_t { Pass, Fail, Skipped };

std::string to_string(CriterionStatus s);

struct CriterionResult {
  int id = 0;
  std::string title;
  CriterionStatus status = CriterionStatus::Pass;
  std::string detail;
};

/// Deliberate corruptions used to prove the suite can fail.
enum class Fault : std::uint8_t {
  None,
  AxisInsteadOfNull,  // every nulled beam sent along an antenna axis
  DropLastSlot,       // scheme tables lose their final slot
  SkewTheorem6,       // catalog entry for thm6 loosened
};

Fault parse_fault(const std::string& name);  // throws BadArgument

struct AcceptanceOptions {
  int decode_seeds = 100;
  int slope_seeds = 20;
  /// False reports the tjsp53-gated checks as skipped.
  bool tjsp53_available = true;
  Fault fault = Fault::None;
  /// Restrict to these criterion ids (empty = all).
  std::vector<int> only;
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line per criterion: "[PASS] 3 scheme decodability: ...".
std::string format_result(const CriterionResult& r);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace sdof
