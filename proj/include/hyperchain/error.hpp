#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperchain {

enum class ErrorCode {
  EmptyEdgeSet,
  IsolatedVertex,
  IndexOutOfRange,
  DuplicateEdge,
  InvalidRate,
  SupportMismatch,
  NotASubgraph,
  EmptySubset,
  TooLarge,
  NotLinear,
  RootedGraph,
  NoSpanningLinearSubgraph,
  NotAnEquilibrium,
  Lambda1NotFound,
  NotAnEigenpair,
  NotHamiltonian,
  Inapplicable,
  ZeroVector,
  DimensionMismatch,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyperchain
