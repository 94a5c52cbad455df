// Error taxonomy for the workbench.  Every failure mode that a caller can
// provoke with legal-looking input gets its own type; anything else is a
// programming error and asserts.
#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

struct QsdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lift() called on a class outside the narrow subspace
struct NotNarrow : QsdError {
  using QsdError::QsdError;
};

// ambient pairing singular on the quotient by ker(e(E) cup -)
struct AmbientDegenerate : QsdError {
  using QsdError::QsdError;
};

// nonequivariant limit requested of a series still carrying lambda^{<0}
struct NegativeLambdaPower : QsdError {
  using QsdError::QsdError;
};

// binary operation on series with different truncation orders
struct TruncationMismatch : QsdError {
  using QsdError::QsdError;
};

// series matrix inversion on an operand that is not unipotent + nilpotent
struct NotUnipotent : QsdError {
  using QsdError::QsdError;
};

// q -> c q u(q) substitution fed a non-unit u
struct SubstitutionOverflow : QsdError {
  using QsdError::QsdError;
};

// z^0 layer of the normalized I-function leaves span{1, H}
struct MirrorMapOutOfRange : QsdError {
  using QsdError::QsdError;
};

// bundle with a negative splitting degree
struct NonConvex : QsdError {
  using QsdError::QsdError;
};

// request for odd-degree cohomology data (everything here is even)
struct OddDegree : QsdError {
  using QsdError::QsdError;
};

// operation fed a module of the wrong flavor (e.g. compact-support
// chern data asked of a plain module)
struct FlavorMismatch : QsdError {
  using QsdError::QsdError;
};

// restriction of a solution to the narrow subspace does not close
struct NarrowNotClosed : QsdError {
  using QsdError::QsdError;
};

// cache entry fails its content hash; caller recomputes
struct CacheCorrupt : QsdError {
  using QsdError::QsdError;
};

// malformed scalar text or scenario file
struct ParseError : QsdError {
  using QsdError::QsdError;
};

}  // namespace qsd
