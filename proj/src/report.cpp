#include "infdoob/report.hpp"

#include <algorithm>
#include <cmath>

namespace infdoob {

double relative_slack(double lhs, double bound) {
  if (std::isinf(bound) && bound > 0) return std::isinf(lhs) ? 0.0 : 1.0;
  return (bound - lhs) / std::max(std::abs(bound), kAbsFloor);
}

VerificationReport make_report(std::string id, double lhs, double rhs,
                               double constant, double tolerance) {
  VerificationReport r;
  r.id = std::move(id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = constant;
  r.tolerance = tolerance;
  r.slack = relative_slack(lhs, constant * rhs);
  r.pass = std::isfinite(lhs) && r.slack >= -tolerance;
  return r;
}

void add_step(VerificationReport& report, std::string label, double lhs,
              double rhs) {
  const bool ok = relative_slack(lhs, rhs) >= -report.tolerance;
  report.steps.push_back({std::move(label), lhs, rhs, ok});
  if (!ok) report.pass = false;
}

void merge_worst(VerificationReport& into, const VerificationReport& other) {
  if (other.slack < into.slack) {
    into.lhs = other.lhs;
    into.rhs = other.rhs;
    into.constant = other.constant;
    into.slack = other.slack;
  }
  into.pass = into.pass && other.pass;
}

void apply_tolerance(VerificationReport& report, double tolerance) {
  report.tolerance = tolerance;
  bool pass = std::isfinite(report.lhs) && report.slack >= -tolerance;
  for (ChainStep& step : report.steps) {
    step.pass = relative_slack(step.lhs, step.rhs) >= -tolerance;
    pass = pass && step.pass;
  }
  report.pass = pass;
}

}  // namespace infdoob
