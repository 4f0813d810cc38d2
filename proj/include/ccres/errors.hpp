#pragma once

#include <stdexcept>
#include <string>

namespace ccres {

/// Failure categories raised by the numerical layers.
enum class ErrorKind {
  domain,             ///< argument outside the function's domain (e.g. z = 0 for n̂)
  overflow,           ///< growth factor not representable in double precision
  singular_matrix,    ///< a propagation or matching matrix is numerically singular
  degenerate,         ///< |det(S - I)| underflow; residual undefined at this point
  no_convergence,     ///< iterative method exhausted its budget
  step_underflow,     ///< continuation step would drop below h_min
  config              ///< invalid user configuration
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace ccres
