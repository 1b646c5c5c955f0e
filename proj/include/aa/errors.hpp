#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aa {

/// Base of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed net or log input. `line` is 0 when the location is an XML element
/// rather than a text line; `context` names the offending element then.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t line = 0, std::string context = {})
      : Error(format(msg, line, context)), line(line), context(std::move(context)) {}
  std::size_t line;
  std::string context;

 private:
  static std::string format(const std::string& msg, std::size_t line, const std::string& ctx) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!ctx.empty()) out += " in <" + ctx + ">";
    return out + ": " + msg;
  }
};

struct MissingMarking : Error {
  using Error::Error;
};

struct NotEnabled : Error {
  using Error::Error;
};

struct SafetyViolation : Error {
  using Error::Error;
};

/// A state-space exploration exceeded its node cap.
struct ExplosionGuard : Error {
  using Error::Error;
};

struct EmptyAlphabet : Error {
  using Error::Error;
};

struct AlphabetMismatch : Error {
  using Error::Error;
};

/// A solver model that does not decode to a firing sequence (encoder bug).
struct MalformedModel : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  using Error::Error;
};

struct UnsafeNet : Error {
  using Error::Error;
};

struct LoopWithZeroEpsilon : Error {
  using Error::Error;
};

struct HasLoop : Error {
  using Error::Error;
};

struct EpsilonZero : Error {
  using Error::Error;
};

struct GenerationRetryExceeded : Error {
  using Error::Error;
};

}  // namespace aa
