#include "codedopt/errors.hpp"

namespace codedopt {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidSparsity: return "invalid-sparsity";
    case Errc::InvalidParameter: return "invalid-parameter";
    case Errc::DivisionByZero: return "division-by-zero";
    case Errc::DegenerateCone: return "degenerate-cone";
    case Errc::InvalidShape: return "invalid-shape";
    case Errc::InvalidPartition: return "invalid-partition";
    case Errc::InvalidStragglers: return "invalid-stragglers";
    case Errc::DegenerateIteration: return "degenerate-iteration";
    case Errc::Divergence: return "divergence";
    case Errc::InvalidSampleSet: return "invalid-sample-set";
    case Errc::SearchMode: return "search-mode";
    case Errc::BoundaryNotBracketed: return "boundary-not-bracketed";
    case Errc::Config: return "config";
    case Errc::Io: return "io";
  }
  return "unknown";
}

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::Config: return 2;
    case Errc::Io: return 4;
    default: return 3;
  }
}

}  // namespace codedopt
