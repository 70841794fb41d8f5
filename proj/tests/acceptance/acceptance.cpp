// One line per acceptance criterion: PASS or FAIL, the worst check, and the
// wall time. Exit status is non-zero when any criterion fails.
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "starfv/cli.hpp"
#include "starfv/verify.hpp"

namespace {

constexpr std::uint64_t kSeed = 42;

// Wall-time limits in seconds.
const std::map<int, double> kRuntimeLimit = {{1, 10.0}, {3, 60.0}, {9, 120.0}};

std::string worst_check(const starfv::verify::CheckResult& r) {
  if (!r.error.empty()) return "error: " + r.error;
  for (const auto& c : r.checks)
    if (!c.passed()) return c.label;
  return std::to_string(r.checks.size()) + " checks";
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  int failures = 0;
  for (int id = 1; id <= starfv::verify::kCriteriaCount; ++id) {
    const auto start = clock::now();
    const auto r = starfv::verify::run_criterion(id, kSeed);
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    bool ok = r.passed();
    std::string note = worst_check(r);
    if (const auto it = kRuntimeLimit.find(id); it != kRuntimeLimit.end() && secs >= it->second) {
      ok = false;
      note += ", too slow";
    }
    failures += !ok;
    std::printf("criterion %2d %-4s %-28s %7.2fs  %s\n", id, ok ? "PASS" : "FAIL", r.name.c_str(), secs,
                note.c_str());
    std::fflush(stdout);
  }

  const auto start = clock::now();
  std::string reports[2];
  int status[2];
  for (int k = 0; k < 2; ++k) {
    std::ostringstream out, err;
    status[k] = starfv::cli::run({"verify", "--suite", "all", "--seed", std::to_string(kSeed)}, out, err);
    reports[k] = out.str();
  }
  const double secs = std::chrono::duration<double>(clock::now() - start).count();
  const bool same = reports[0] == reports[1] && !reports[0].empty();
  const bool ok = same && status[0] == status[1];
  failures += !ok;
  std::printf("criterion 14 %-4s %-28s %7.2fs  %s\n", ok ? "PASS" : "FAIL", "determinism", secs,
              same ? "reports byte-identical" : "reports differ");

  std::printf("%d of %d criteria failed\n", failures, starfv::verify::kCriteriaCount + 1);
  return failures == 0 ? 0 : 1;
}
