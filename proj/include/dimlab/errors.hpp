#pragma once

#include <stdexcept>
#include <string>

namespace dimlab {

// Errors are exceptions; each named condition from the module contracts
// gets its own type so tests can catch them precisely.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainExceeded : Error { using Error::Error; };
struct BoundaryZero : Error { using Error::Error; };
struct OracleUnavailable : Error { using Error::Error; };
struct QuadratureDivergence : Error { using Error::Error; };
struct AtZero : Error { using Error::Error; };
struct InsufficientProfile : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct TailTooShort : Error { using Error::Error; };
struct TargetsTooClose : Error { using Error::Error; };
struct VerificationFailed : Error { using Error::Error; };
struct EmptyPacking : Error { using Error::Error; };
struct NoIsland : Error { using Error::Error; };
struct ContinuationLost : Error { using Error::Error; };
struct ValidationFailed : Error { using Error::Error; };
struct InvalidCollection : Error { using Error::Error; };
struct DegenerateRegression : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace dimlab
