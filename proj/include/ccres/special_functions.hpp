#pragma once

// Riccati-Bessel family for integer angular momentum and complex argument.
//
//   ĵ_l(z) = z j_l(z)             regular,   ĵ_0 = sin z
//   n̂_l(z) = z n_l(z)             irregular, n̂_0 = -cos z
//   ĥ±_l(z) = -n̂_l(z) ± i ĵ_l(z)  ĥ±_0 = exp(±iz)
//
// All functions return the value together with d/dz. They are pure and
// thread-safe.

#include <complex>

namespace ccres {

using cplx = std::complex<double>;

struct RiccatiValue {
  cplx value;
  cplx derivative;  // with respect to z = kr
};

enum class HankelSign { incoming = -1, outgoing = +1 };

/// Regular solution. Defined as 0 at z = 0 (derivative 1 for l = 0).
/// Throws Error(overflow) when exp(|Im z|) is not representable.
RiccatiValue riccati_j(int l, cplx z);

/// Irregular solution. Throws Error(domain) at z = 0.
RiccatiValue riccati_n(int l, cplx z);

/// Incoming / outgoing wave, evaluated directly in the form
/// exp(±iz) · polynomial(1/z) so that the recessive member stays accurate
/// for large |Im z|. Throws Error(domain) at z = 0.
RiccatiValue riccati_h(int l, HankelSign sign, cplx z);

}  // namespace ccres
