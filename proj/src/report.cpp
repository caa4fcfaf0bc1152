#include "sgl/report.hpp"

#include <cmath>
#include <cstdio>

namespace sgl {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Violated: return "Violated";
    default: return "Inconclusive";
  }
}

Verdict evaluate_inequality(Real lhs, Real rhs, Real tolerance, Real error_bar) {
  const Real scale = std::max({std::abs(lhs), std::abs(rhs), Real(1e-300)});
  const Real margin = (lhs - rhs) / scale;
  if (std::abs(margin) < error_bar) return Verdict::Inconclusive;
  return (margin >= -tolerance) ? Verdict::Holds : Verdict::Violated;
}

InequalityReport make_report(const std::string& name, const std::string& instance, Real lhs,
                             Real rhs, Real tolerance, Real error_bar) {
  InequalityReport r;
  r.name = name;
  r.instance = instance;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.error_bar = error_bar;
  r.verdict = evaluate_inequality(lhs, rhs, tolerance, error_bar);
  return r;
}

std::string reports_to_csv(const std::vector<InequalityReport>& reports) {
  std::string out = "name,instance,lhs,rhs,tolerance,error_bar,verdict\n";
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.12g,%.12g,%.12g,%.12g,%s\n", r.name.c_str(),
                  r.instance.c_str(), r.lhs, r.rhs, r.tolerance, r.error_bar,
                  to_string(r.verdict));
    out += buf;
  }
  return out;
}

} // namespace sgl
