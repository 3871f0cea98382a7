#pragma once

#include <string>
#include <vector>

namespace nullcone {

/// One named numerical check: `passed` is the verdict, `measured` the worst
/// observed deviation, `tolerance` the pinned budget it was held against.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;  // free-form context (outcomes, sample counts, ...)
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
  /// Look up a check by name; throws InvalidArgument if absent.
  const CheckResult& check(const std::string& name) const;
};

/// Names accepted by run_verify_suite, in display order:
/// area-law, rescaling, ancient, kruskal, geometry.
std::vector<std::string> verify_suite_names();

/// Run one suite of closed-form law checks at the given grid resolution
/// (nlat Gauss latitudes, 2*nlat longitudes, lmax = nlat - 1). Tolerances
/// are pinned for nlat = 64; coarser grids may legitimately fail.
/// Throws InvalidArgument for an unknown suite name.
SuiteResult run_verify_suite(const std::string& suite, int nlat = 64);

/// JSON object with the suite name, overall verdict, and per-check records.
std::string to_json(const SuiteResult& result);

}  // namespace nullcone
