#pragma once

#include <stdexcept>
#include <string>

namespace hjlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied parameters was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Requested level mu lies below min_p H(p, y) at some point.
class LevelBelowMinimum : public Error {
 public:
  using Error::Error;
};

/// Level mu does not exceed sup H(0, s) over the integration range.
class LevelNotAdmissible : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class CflViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Grid spacing does not resolve the oscillation scale epsilon.
class UnresolvedScale : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Flux limiter below max(mu*_L, mu*_R).
class InvalidLimiter : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// An iterative solver failed to reach its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace hjlab
