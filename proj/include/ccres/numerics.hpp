#pragma once

#include <cmath>
#include <utility>

#include "ccres/errors.hpp"

namespace ccres {

/// Illinois variant of regula falsi on a bracket [a, b] with f(a)·f(b) <= 0.
/// Stops when the bracket is narrower than xtol or f hits zero exactly.
/// Throws Error(no_convergence) after max_iter iterations.
template <class F>
double illinois(F&& f, double a, double b, double fa, double fb, double xtol, int max_iter) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0)) throw Error(ErrorKind::domain, "illinois: bracket has no sign change");
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    if (std::abs(b - a) <= xtol * std::max(1.0, std::abs(c))) return c;
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc < 0.0) == (fb < 0.0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == +1) fb *= 0.5;
      side = +1;
    }
  }
  throw Error(ErrorKind::no_convergence, "illinois: bracket did not shrink below tolerance");
}

}  // namespace ccres
