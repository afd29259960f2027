#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace lieheat {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  [[nodiscard]] bool passed() const;
  /// Null when everything passed.
  [[nodiscard]] const CheckResult* first_failure() const;
};

/// all, freealg, expansions, majorants, kernels, heatflow, precess.
std::vector<std::string> verify_suites();

/// Throws std::invalid_argument for an unknown suite.
VerifyReport run_verify(const std::string& suite);

/// Deterministic report, no timings.
nlohmann::json to_json(const VerifyReport& r);
/// Per-check wall time, kept out of the main report.
nlohmann::json timings_json(const VerifyReport& r);

}  // namespace lieheat
