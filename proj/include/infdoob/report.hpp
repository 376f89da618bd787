#pragma once

#include <map>
#include <string>
#include <vector>

namespace infdoob {

inline constexpr double kDefaultRelTol = 1e-12;
inline constexpr double kAbsFloor = 1e-300;

// A single intermediate inequality inside a longer proof chain.
struct ChainStep {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

// One checked inequality LHS <= constant * RHS.
//
// slack is relative: (constant*RHS - LHS) / max(constant*RHS, kAbsFloor), so
// pass <=> slack >= -tolerance <=> LHS <= constant*RHS*(1 + tolerance).
struct VerificationReport {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 1.0;
  double slack = 0.0;
  double tolerance = kDefaultRelTol;
  bool pass = true;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> labels;
  std::vector<ChainStep> steps;

  double bound() const { return constant * rhs; }
};

double relative_slack(double lhs, double bound);

// Builds a report and fills slack/pass.
VerificationReport make_report(std::string id, double lhs, double rhs,
                               double constant = 1.0,
                               double tolerance = kDefaultRelTol);

// Appends a chain step; a failing step also fails the report.
void add_step(VerificationReport& report, std::string label, double lhs,
              double rhs);

// Folds the verdict of `other` into `into`, keeping the worst (lowest slack)
// headline numbers.
void merge_worst(VerificationReport& into, const VerificationReport& other);

// Re-judges the headline and the stored steps under another tolerance.
void apply_tolerance(VerificationReport& report, double tolerance);

}  // namespace infdoob
