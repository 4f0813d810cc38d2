#include "ccres/special_functions.hpp"

#include <cmath>
#include <string>

#include "ccres/errors.hpp"

namespace ccres {

namespace {

constexpr double kMaxExponent = 700.0;

void check_growth(cplx z, const char* who) {
  if (std::abs(z.imag()) > kMaxExponent) {
    throw Error(ErrorKind::overflow,
                std::string(who) + ": exp(|Im z|) overflows for Im z = " +
                    std::to_string(z.imag()));
  }
}

void check_nonzero(cplx z, const char* who) {
  if (z == cplx{0.0, 0.0}) {
    throw Error(ErrorKind::domain,
                std::string(who) + ": irregular solution diverges at z = 0");
  }
}

// Ascending series ĵ_l(z) = z^{l+1}/(2l+1)!! Σ_m (-z²/2)^m / (m! (2l+3)...(2l+2m+1)).
// Exact to rounding while |z| is not much larger than l.
RiccatiValue j_series(int l, cplx z) {
  const cplx w = -0.5 * z * z;
  cplx term = 1.0;
  cplx sum = 1.0;
  cplx dsum = static_cast<double>(l + 1);
  for (int m = 1; m < 300; ++m) {
    term *= w / (static_cast<double>(m) * (2.0 * l + 2.0 * m + 1.0));
    sum += term;
    dsum += static_cast<double>(l + 1 + 2 * m) * term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  double dfact = 1.0;
  for (int i = 3; i <= 2 * l + 1; i += 2) dfact *= i;
  const cplx zl = std::pow(z, l);
  return {zl * z * sum / dfact, zl * dsum / dfact};
}

bool use_series(int l, cplx z) {
  return std::abs(z) < std::max(2.0, l + 1.0);
}

}  // namespace

RiccatiValue riccati_j(int l, cplx z) {
  if (l < 0) throw Error(ErrorKind::domain, "riccati_j: negative l");
  check_growth(z, "riccati_j");
  if (z == cplx{0.0, 0.0}) return {0.0, l == 0 ? 1.0 : 0.0};
  if (use_series(l, z)) return j_series(l, z);

  // Upward recurrence; stable while l stays below |z|.
  const cplx s = std::sin(z);
  const cplx c = std::cos(z);
  cplx prev = c;  // ĵ_{-1}
  cplx cur = s;   // ĵ_0
  for (int n = 0; n < l; ++n) {
    const cplx next = (2.0 * n + 1.0) / z * cur - prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev - static_cast<double>(l) / z * cur};
}

RiccatiValue riccati_n(int l, cplx z) {
  if (l < 0) throw Error(ErrorKind::domain, "riccati_n: negative l");
  check_nonzero(z, "riccati_n");
  check_growth(z, "riccati_n");
  cplx prev = std::sin(z);   // n̂_{-1}
  cplx cur = -std::cos(z);   // n̂_0
  for (int n = 0; n < l; ++n) {
    const cplx next = (2.0 * n + 1.0) / z * cur - prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev - static_cast<double>(l) / z * cur};
}

RiccatiValue riccati_h(int l, HankelSign sign, cplx z) {
  if (l < 0) throw Error(ErrorKind::domain, "riccati_h: negative l");
  check_nonzero(z, "riccati_h");
  check_growth(z, "riccati_h");
  const double s = sign == HankelSign::outgoing ? 1.0 : -1.0;
  const cplx e = std::exp(cplx{0.0, s} * z);
  cplx prev = cplx{0.0, s} * e;  // ĥ±_{-1} = ±i exp(±iz)
  cplx cur = e;                   // ĥ±_0
  for (int n = 0; n < l; ++n) {
    const cplx next = (2.0 * n + 1.0) / z * cur - prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev - static_cast<double>(l) / z * cur};
}

}  // namespace ccres
