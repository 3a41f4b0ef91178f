#pragma once
// The twelve acceptance criteria, with pinned tolerances that can be overridden by key.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bopp {

struct CheckValue {
  enum class Kind { AtMost, AtLeast, Flag };
  std::string key;  // tolerance key, or a descriptive label for flags
  double measured = 0.0;
  double tol = 0.0;
  Kind kind = Kind::AtMost;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;  // short filter name, e.g. "moyal"
  std::vector<CheckValue> checks;
  std::vector<std::string> notes;  // informational measurements
  std::string error;               // set when a check threw
  bool pass = false;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::map<std::string, double> tol;  // overrides of default_tolerances()
  std::string only;                   // criterion name or number; empty runs all
  std::uint64_t seed = 20240617;
};

// Key -> pinned tolerance.
const std::map<std::string, double>& default_tolerances();
// Names of the criteria in order (index + 1 is the criterion number).
const std::vector<std::string>& criterion_names();

// Throws InvalidArgument for unknown tolerance keys, non-positive values or an unknown filter.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// "[PASS]  5 intertwining  intertwining=2.1e-09<=1e-05 ... (3.2 s)"
std::string format_result(const CriterionResult& r);

}  // namespace bopp
