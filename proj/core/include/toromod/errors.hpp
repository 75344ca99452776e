#pragma once

#include <stdexcept>
#include <string>

namespace toromod {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad builder parameters, bad indices, bad walks, and similar caller mistakes.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A loaded or constructed complex violates its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A circle map has an ambiguous increment (|delta| == 1/2) on some edge.
class NotEdgeFineError : public Error {
 public:
  using Error::Error;
};

/// Edge increments of a circle map do not sum to zero around some face.
class FaceInconsistentError : public Error {
 public:
  using Error::Error;
};

/// A lifted map violates the deck relation beyond tolerance.
class DeckRelationError : public Error {
 public:
  using Error::Error;
};

/// Edge increments are not exact relative to the winding cocycle; no lift exists.
class LiftInconsistentError : public Error {
 public:
  using Error::Error;
};

/// A cut handed to a surface operation does not block all winding cycles.
class NotSeparatingError : public Error {
 public:
  using Error::Error;
};

/// The requested neighborhood of a cut wraps around the torus or the
/// resulting map fails its degree certificate.
class EpsTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A density fails the edgewise upper-gradient inequality for the given map.
class UpperGradientError : public Error {
 public:
  using Error::Error;
};

/// The capacity energy is non-coercive (zero-measure edge class).
class DegenerateComplexError : public Error {
 public:
  using Error::Error;
};

/// A brute-force helper was called beyond its documented size limits.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace toromod
