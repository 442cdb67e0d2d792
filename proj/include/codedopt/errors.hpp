#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace codedopt {

/// Failure categories raised by the library. The CLI maps these onto exit
/// codes (see `exit_code_for`).
enum class Errc {
  InvalidSparsity,
  InvalidParameter,
  DivisionByZero,
  DegenerateCone,
  InvalidShape,
  InvalidPartition,
  InvalidStragglers,
  DegenerateIteration,
  Divergence,
  InvalidSampleSet,
  SearchMode,
  BoundaryNotBracketed,
  Config,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// 2 = configuration, 3 = runtime (divergence / bracketing), 4 = I/O.
int exit_code_for(Errc code) noexcept;

}  // namespace codedopt
