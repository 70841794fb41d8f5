#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Cross-check battery: closed forms against each other, against quadrature,
// and against simulation. Tolerances are fixed here, not configurable.
namespace starfv::verify {

struct SubCheck {
  std::string label;
  double observed;
  double limit;
  // true: pass when observed <= limit; false: pass when observed >= limit.
  bool upper_bound = true;

  bool passed() const;
};

struct CheckResult {
  int id;
  std::string name;
  std::vector<SubCheck> checks;
  // Set when the criterion threw instead of producing residuals.
  std::string error;

  bool passed() const;
};

inline constexpr int kCriteriaCount = 13;

std::string criterion_name(int id);

// Criterion ids in a named suite: all, twotype, eigen, lines, multitype,
// selection, or a comma-separated list of ids.
std::vector<int> suite_criteria(const std::string& suite);

CheckResult run_criterion(int id, std::uint64_t seed);
std::vector<CheckResult> run_suite(const std::vector<int>& ids, std::uint64_t seed);

// One block per criterion plus a summary line; contains no timing, so equal
// inputs give byte-identical text.
std::string format_report(const std::vector<CheckResult>& results);

}  // namespace starfv::verify
