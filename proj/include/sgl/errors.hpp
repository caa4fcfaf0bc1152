#pragma once

#include <stdexcept>
#include <string>

namespace sgl {

/// Base for all typed failures; `kind` is a stable machine-readable tag.
struct Error : std::runtime_error {
  Error(std::string kind_, const std::string& what_)
      : std::runtime_error(kind_ + ": " + what_), kind(std::move(kind_)) {}
  std::string kind;
};

#define SGL_ERROR_TYPE(Name)                                          \
  struct Name : Error {                                               \
    explicit Name(const std::string& w = "") : Error(#Name, w) {}     \
  }

// cmpfun
SGL_ERROR_TYPE(DivisionByZero);
SGL_ERROR_TYPE(NonPositiveSystole);
SGL_ERROR_TYPE(InvalidProfile);

// surface
SGL_ERROR_TYPE(DegenerateLattice);
SGL_ERROR_TYPE(NonPositiveWarp);
SGL_ERROR_TYPE(DegenerateTriangle);
SGL_ERROR_TYPE(EmptySelection);
SGL_ERROR_TYPE(WrongClass);
SGL_ERROR_TYPE(NonPositiveFactor);
SGL_ERROR_TYPE(SeparatingLoop);
SGL_ERROR_TYPE(NonSimpleLoop);
SGL_ERROR_TYPE(OneSidedLoop);
SGL_ERROR_TYPE(NonIncreasingRadii);

// spectral
SGL_ERROR_TYPE(SolverDivergence);
SGL_ERROR_TYPE(EmptyInterior);
SGL_ERROR_TYPE(ZeroVector);
SGL_ERROR_TYPE(NegativeDensity);
SGL_ERROR_TYPE(DisjointRegion);

// geodesics
SGL_ERROR_TYPE(PositiveChi);
SGL_ERROR_TYPE(CapTooSmall);
SGL_ERROR_TYPE(NoBoundary);
SGL_ERROR_TYPE(NonSimpleCore);
SGL_ERROR_TYPE(InvalidModel);

// lab
SGL_ERROR_TYPE(InvalidCurvatureBound);
SGL_ERROR_TYPE(NoValidCandidate);
SGL_ERROR_TYPE(MissingCurvatureField);
SGL_ERROR_TYPE(FactorNotOneOnCore);
SGL_ERROR_TYPE(DeltaOutOfRange);

// cli
SGL_ERROR_TYPE(SchemaError);

#undef SGL_ERROR_TYPE

} // namespace sgl
