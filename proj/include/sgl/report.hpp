#pragma once

#include "sgl/types.hpp"

#include <string>
#include <vector>

namespace sgl {

enum class Verdict { Holds, Violated, Inconclusive };

const char* to_string(Verdict v);

/// One checked inequality instance, normalized to lhs >= rhs.
struct InequalityReport {
  std::string name;
  std::string instance;
  Real lhs = 0;
  Real rhs = 0;
  Real tolerance = 0; // relative to max(|lhs|, |rhs|)
  Real error_bar = 0; // relative discretization bar; bands verdicts to Inconclusive
  Verdict verdict = Verdict::Inconclusive;
};

/// Verdict rule: Inconclusive when the error bar spans the gap, otherwise
/// Holds iff lhs >= rhs - tolerance (relative).
Verdict evaluate_inequality(Real lhs, Real rhs, Real tolerance, Real error_bar);

InequalityReport make_report(const std::string& name, const std::string& instance, Real lhs,
                             Real rhs, Real tolerance, Real error_bar = 0);

std::string reports_to_csv(const std::vector<InequalityReport>& reports);

} // namespace sgl
