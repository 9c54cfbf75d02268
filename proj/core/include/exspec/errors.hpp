#pragma once

#include <stdexcept>
#include <string>

namespace exspec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EXSPEC_DEFINE_ERROR(Name)                \
  class Name : public Error {                    \
   public:                                       \
    using Error::Error;                          \
  }

EXSPEC_DEFINE_ERROR(NonIntegrableTail);
EXSPEC_DEFINE_ERROR(NonIntegrableCore);
EXSPEC_DEFINE_ERROR(InsufficientSpectrum);
EXSPEC_DEFINE_ERROR(DivergentTail);
EXSPEC_DEFINE_ERROR(IllConditionedFit);
EXSPEC_DEFINE_ERROR(QuadratureFailure);
EXSPEC_DEFINE_ERROR(BoxTooSmall);
EXSPEC_DEFINE_ERROR(MissingCoefficient);
EXSPEC_DEFINE_ERROR(SpectrumRangeExceeded);
EXSPEC_DEFINE_ERROR(EmptyLattice);
EXSPEC_DEFINE_ERROR(WrongTailExponent);
EXSPEC_DEFINE_ERROR(FitFailure);
EXSPEC_DEFINE_ERROR(InvalidInput);

#undef EXSPEC_DEFINE_ERROR

}  // namespace exspec
