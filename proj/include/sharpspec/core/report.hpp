#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace sharpspec {

struct Check {
  std::string id;         // stable identifier, e.g. "P2.2"
  std::string statement;  // short description of what is measured
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool diagnostic = false;  // reported but never fails the run
  std::string suite;        // set when merged from another report
};

struct Report {
  std::string suite;
  std::vector<Check> checks;

  // Records measured <= tolerance.
  Check& add(std::string id, std::string statement, double measured, double tolerance) {
    bool ok = measured <= tolerance;
    checks.push_back({std::move(id), std::move(statement), measured, tolerance, ok, false, {}});
    return checks.back();
  }

  // Records measured >= bound.
  Check& add_at_least(std::string id, std::string statement, double measured, double bound) {
    checks.push_back({std::move(id), std::move(statement), measured, bound, measured >= bound, false, {}});
    return checks.back();
  }

  Check& add_flag(std::string id, std::string statement, bool ok) {
    checks.push_back({std::move(id), std::move(statement), ok ? 0.0 : 1.0, 0.0, ok, false, {}});
    return checks.back();
  }

  Check& add_diagnostic(std::string id, std::string statement, double measured) {
    checks.push_back({std::move(id), std::move(statement), measured, 0.0, true, true, {}});
    return checks.back();
  }

  void merge(const Report& other) {
    for (Check c : other.checks) {
      if (c.suite.empty()) c.suite = other.suite;
      checks.push_back(std::move(c));
    }
  }

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  // Worst measured value among checks with the given id.
  double worst(const std::string& id) const {
    double w = 0.0;
    for (const auto& c : checks)
      if (c.id == id) w = std::max(w, c.measured);
    return w;
  }

  bool passes(const std::string& id) const {
    bool any = false;
    for (const auto& c : checks) {
      if (c.id != id) continue;
      any = true;
      if (!c.pass) return false;
    }
    return any;
  }
};

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

inline void write_report_csv(std::ostream& os, const Report& r) {
  os << "suite,check_id,statement,measured,tolerance,pass\n";
  for (const auto& c : r.checks) {
    os << (c.suite.empty() ? r.suite : c.suite) << ',' << c.id << ",\"" << c.statement << "\"," << format_real(c.measured) << ','
       << format_real(c.tolerance) << ',' << (c.diagnostic ? "info" : (c.pass ? "yes" : "no")) << '\n';
  }
}

}  // namespace sharpspec
