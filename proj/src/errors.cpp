#include "ccres/errors.hpp"

namespace ccres {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::singular_matrix: return "singular_matrix";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::no_convergence: return "no_convergence";
    case ErrorKind::step_underflow: return "step_underflow";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

}  // namespace ccres
