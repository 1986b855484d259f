#include "gfdyn/app/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace gfdyn::app {

namespace {

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Check make(std::string name, bool ok, double value, double threshold, std::string cmp, std::string detail) {
  Check c;
  c.name = std::move(name);
  c.passed = ok;
  c.value = value;
  c.threshold = threshold;
  c.comparison = std::move(cmp);
  c.detail = std::move(detail);
  return c;
}

}  // namespace

Check check_less(std::string name, double value, double threshold, std::string detail) {
  return make(std::move(name), value < threshold, value, threshold, "<", std::move(detail));
}

Check check_greater(std::string name, double value, double threshold, std::string detail) {
  return make(std::move(name), value > threshold, value, threshold, ">", std::move(detail));
}

Check check_at_least(std::string name, double value, double threshold, std::string detail) {
  return make(std::move(name), value >= threshold, value, threshold, ">=", std::move(detail));
}

Check check_true(std::string name, bool ok, std::string detail) {
  return make(std::move(name), ok, ok ? 1 : 0, 1, "==", std::move(detail));
}

Check& Report::add(Check c) {
  checks.push_back(std::move(c));
  return checks.back();
}

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.passed && !c.diagnostic) return false;
  return true;
}

json Report::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) {
    json w = nullptr;
    if (c.witness) {
      w = complex_to_json(*c.witness);
    } else if (!c.passed) {
      w = c.value;
    }
    cs.push_back({{"name", c.name},
                  {"passed", c.passed},
                  {"diagnostic", c.diagnostic},
                  {"value", c.value},
                  {"threshold", c.threshold},
                  {"comparison", c.comparison},
                  {"detail", c.detail},
                  {"witness", w}});
  }
  return {{"schema", kReportSchema},
          {"schema_version", kReportSchemaVersion},
          {"command", command},
          {"config", app::to_json(config)},
          {"checks", cs},
          {"results", results},
          {"passed", passed()},
          {"timing", timing},
          {"provenance", {{"tool", "gfdyn"}, {"version", kToolVersion}, {"timestamp", utc_timestamp()},
                          {"seed", config.seed}}}};
}

std::string Report::summary() const {
  std::ostringstream os;
  os << command << ": " << (passed() ? "PASS" : "FAIL") << '\n';
  for (const auto& c : checks) {
    char line[512];
    std::snprintf(line, sizeof line, "  [%s] %-44s value=%.6g %s %.6g", c.passed ? "pass" : (c.diagnostic ? "note" : "FAIL"),
                  c.name.c_str(), c.value, c.comparison.c_str(), c.threshold);
    os << line;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << '\n';
  }
  return os.str();
}

}  // namespace gfdyn::app
