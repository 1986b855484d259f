#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gfdyn/app/config.hpp"

namespace gfdyn::app {

inline constexpr const char* kReportSchema = "gfdyn.report";
inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct Check {
  std::string name;
  bool passed = false;
  double value = 0;
  double threshold = 0;
  std::string comparison;        // how value relates to threshold when passing, e.g. "<", ">=", "=="
  std::string detail;
  std::optional<cplx> witness;   // point that failed, when there is one
  bool diagnostic = false;       // logged but not counted towards the exit code
};

struct Report {
  std::string command;
  ExperimentConfig config;
  std::vector<Check> checks;
  json results = json::object();
  json timing = json::object();  // seconds per phase; excluded from reproducibility comparisons

  Check& add(Check c);
  // A failing non-diagnostic check means exit code 1.
  bool passed() const;
  json to_json() const;
  std::string summary() const;   // human readable, one line per check
};

// Value-vs-threshold helpers. A failure without an explicit witness gets the
// measured value as its witness.
Check check_less(std::string name, double value, double threshold, std::string detail = {});
Check check_greater(std::string name, double value, double threshold, std::string detail = {});
Check check_at_least(std::string name, double value, double threshold, std::string detail = {});
Check check_true(std::string name, bool ok, std::string detail = {});

}  // namespace gfdyn::app
