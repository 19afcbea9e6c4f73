#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapgraph {

enum class ErrorCode {
  NonPositiveLength,
  Disconnected,
  DanglingEndpoint,
  DuplicateId,
  UnknownVertex,
  UnknownEdge,
  InvalidPoint,
  NotATree,
  PointAtVertex,
  NotDisconnecting,
  InvalidPotential,
  InvalidClass,
  MeshMisaligned,
  SolverFailure,
  BracketingFailure,
  DegenerateSecond,
  DegenerateRange,
  NotInClass,
  BudgetExhausted,
  ParseError,
  BadFlags,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gapgraph
