#pragma once

#include <stdexcept>
#include <string>

namespace sumrule {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define SUMRULE_DEFINE_ERROR(Name)                                             \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &what) : Error(#Name ": " + what) {}       \
  }

// exact algebra
SUMRULE_DEFINE_ERROR(RateMismatch);
SUMRULE_DEFINE_ERROR(NonPolynomialPotential);
SUMRULE_DEFINE_ERROR(DivergentAtOrigin);
SUMRULE_DEFINE_ERROR(ResonanceUnprojected);
SUMRULE_DEFINE_ERROR(NoPolynomialSolution);
SUMRULE_DEFINE_ERROR(ExponentFloorExceeded);
SUMRULE_DEFINE_ERROR(IrrationalOverlap);

// hydrogen
SUMRULE_DEFINE_ERROR(InvalidQuantumNumbers);
SUMRULE_DEFINE_ERROR(GridTooShort);
SUMRULE_DEFINE_ERROR(NonPositiveQ);
SUMRULE_DEFINE_ERROR(ChannelMismatch);

// numerics
SUMRULE_DEFINE_ERROR(QuadratureNotConverged);
SUMRULE_DEFINE_ERROR(NoBoundState);
SUMRULE_DEFINE_ERROR(NotConverged);
SUMRULE_DEFINE_ERROR(SingularDerivative);

// sum rules
SUMRULE_DEFINE_ERROR(InvalidOrder);
SUMRULE_DEFINE_ERROR(DivergentExpectation);
SUMRULE_DEFINE_ERROR(OutOfValidityRange);
SUMRULE_DEFINE_ERROR(DivergentSumRule);
SUMRULE_DEFINE_ERROR(NonPositiveScale);

#undef SUMRULE_DEFINE_ERROR

} // namespace sumrule
