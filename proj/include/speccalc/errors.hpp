// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace speccalc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define SPECCALC_DEFINE_ERROR(Name)        \
  class Name : public Error {              \
  public:                                  \
    explicit Name(const std::string& what) \
        : Error(#Name ": " + what) {}      \
  }

SPECCALC_DEFINE_ERROR(GeometryError);
SPECCALC_DEFINE_ERROR(SingularResolvent);
SPECCALC_DEFINE_ERROR(NotBisectorial);
SPECCALC_DEFINE_ERROR(QuadratureDiverged);
SPECCALC_DEFINE_ERROR(RegularizerNotInjective);
SPECCALC_DEFINE_ERROR(NoRegularizer);
SPECCALC_DEFINE_ERROR(NotClopen);
SPECCALC_DEFINE_ERROR(RankIndeterminate);
SPECCALC_DEFINE_ERROR(EmptyResolvent);
SPECCALC_DEFINE_ERROR(UndeclaredLimit);
SPECCALC_DEFINE_ERROR(ZeroAtSingularPoint);
SPECCALC_DEFINE_ERROR(SingularSystem);
SPECCALC_DEFINE_ERROR(ParseError);
SPECCALC_DEFINE_ERROR(InputError);
SPECCALC_DEFINE_ERROR(PreconditionError);

#undef SPECCALC_DEFINE_ERROR

}  // namespace speccalc
