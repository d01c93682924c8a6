#pragma once

#include <stdexcept>
#include <string>

namespace tpe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TPE_DEFINE_ERROR(Name)             \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

TPE_DEFINE_ERROR(InvalidGeometry);
TPE_DEFINE_ERROR(MeshValidationError);
TPE_DEFINE_ERROR(DomainError);
TPE_DEFINE_ERROR(SingularPointError);
TPE_DEFINE_ERROR(InadmissibleSpec);
TPE_DEFINE_ERROR(InadmissibleIndex);
TPE_DEFINE_ERROR(InadmissibleCall);
TPE_DEFINE_ERROR(NotRetractable);
TPE_DEFINE_ERROR(DegenerateDirection);
TPE_DEFINE_ERROR(OracleFailure);
TPE_DEFINE_ERROR(OracleDegenerate);
TPE_DEFINE_ERROR(ParseError);

#undef TPE_DEFINE_ERROR

}  // namespace tpe
