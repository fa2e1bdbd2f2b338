#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace binshift {

// Error taxonomy. The CLI maps these onto its exit codes: invalid input (1),
// verification failure (2), internal inconsistency (3).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos, std::string expected_tok)
      : Error(msg + " at position " + std::to_string(pos) +
              (expected_tok.empty() ? "" : " (expected " + expected_tok + ")")),
        position(pos),
        expected(std::move(expected_tok)) {}
  std::size_t position = 0;
  std::string expected;
};

struct InvalidStream : Error {
  using Error::Error;
};

struct MirrorPeriodic : Error {
  MirrorPeriodic(const std::string& msg, std::size_t p) : Error(msg), period(p) {}
  std::size_t period = 0;
};

struct IndexBeyondPrefix : Error {
  IndexBeyondPrefix(std::size_t idx, std::size_t len)
      : Error("index " + std::to_string(idx) + " beyond prefix of length " +
              std::to_string(len)),
        index(idx),
        length(len) {}
  std::size_t index = 0, length = 0;
};

struct NotABreakPoint : Error {
  using Error::Error;
};

struct NotEnoughBreakPoints : Error {
  using Error::Error;
};

struct SizeTooLarge : Error {
  using Error::Error;
};

struct StructureViolation : Error {
  StructureViolation(const std::string& msg, std::size_t idx)
      : Error(msg + " (sequence index " + std::to_string(idx) + ")"), index(idx) {}
  std::size_t index = 0;
};

struct DepthSearchExceeded : Error {
  using Error::Error;
};

// Violation of an identity that holds for every admissible input; indicates a
// bug in this library, never bad input.
struct InternalInconsistency : Error {
  using Error::Error;
};

}  // namespace binshift
