#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace borelcalc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotHermitian : Error {
  using Error::Error;
};
struct NotNormal : Error {
  using Error::Error;
};
struct NotSelfAdjoint : Error {
  using Error::Error;
};
struct NotCommuting : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct NotInvertible : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct ClusterAmbiguity : Error {
  using Error::Error;
};
struct NotInvariant : Error {
  using Error::Error;
};
struct RegularizerVanishes : Error {
  using Error::Error;
};
struct BadAtom : Error {
  using Error::Error;
};
struct DegreeTooSmall : Error {
  using Error::Error;
};
struct IOError : Error {
  using Error::Error;
};

struct ArityError : Error {
  using Error::Error;
};

/// Parse failure carrying the byte offset of the offending input and the
/// token set the parser would have accepted there.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t offset,
             std::vector<std::string> expected = {})
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset(offset),
        expected(std::move(expected)) {}

  std::size_t offset;
  std::vector<std::string> expected;
};

}  // namespace borelcalc
