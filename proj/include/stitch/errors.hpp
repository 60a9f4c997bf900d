#pragma once
#include <stdexcept>
#include <string>

namespace stitch {

enum class Err {
  DegenerateDepth,
  SingularMatrix,
  OutOfRange,
  TooFewMatches,
  NoConsensus,
  DegenerateSample,
  DegenerateConfiguration,
  AmbiguousSide,
  EmptyNonOverlap,
  ScaleTooSmall,
  InvalidBracket,
  NoOverlap,
  EmptyCanvas,
  InvalidOverlap,
  VerticalPair,
  IoError
};

const char* err_name(Err e);

class StitchError : public std::runtime_error {
 public:
  StitchError(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace stitch
