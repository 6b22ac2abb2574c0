#pragma once

#include <stdexcept>
#include <string>

namespace fastslow {

enum class ErrorKind {
  Syntax,
  Validation,
  Config,
  UnpartitionedAction,
  IndexOutOfRange,
  StateLimitExceeded,
  OverlappingActions,
  RepeatedSpecies,
  StateCollision,
  LiftAmbiguity,
  Relation,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fastslow
