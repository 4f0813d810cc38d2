#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ccres/errors.hpp"
#include "ccres/special_functions.hpp"

using ccres::cplx;
using ccres::HankelSign;
using ccres::riccati_h;
using ccres::riccati_j;
using ccres::riccati_n;

namespace {

const cplx I{0.0, 1.0};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Ascending series ĵ_l(z) = z^{l+1} Σ_m (-z²/2)^m / (m! (2l+2m+1)!!).
cplx series_j(int l, cplx z, int terms = 30) {
  double dfact = 1.0;
  for (int i = 1; i <= 2 * l + 1; i += 2) dfact *= i;
  cplx term = std::pow(z, l + 1) / dfact;
  cplx sum = term;
  for (int m = 1; m < terms; ++m) {
    term *= -0.5 * z * z / (m * (2.0 * l + 2.0 * m + 1.0));
    sum += term;
  }
  return sum;
}

// Frozen high-precision values (40 digits, truncated to 17): l, z, ĵ, ĵ', n̂, n̂'.
struct Frozen {
  int l;
  cplx z, j, dj, n, dn;
};

const Frozen kFrozen[] = {
  {0, {0.69999999999999996, 0.0}, {0.64421768723769102, 0.0}, {0.76484218728448845, 0.0}, {-0.76484218728448845, 0.0}, {0.64421768723769102, 0.0}},
  {1, {2.5, 0.29999999999999999}, {1.0726122716312258, 0.056443597988426096}, {0.19998078336757337, -0.21546690427531912}, {-0.28675112924970465, 0.27620067176279542}, {0.93746905611110947, 0.059766310705584715}},
  {2, {1.0, 0.5}, {0.02203697838460418, 0.08554014023176615}, {0.15876103644529439, 0.16494532176285306}, {-2.0413133562472512, 1.825631050135506}, {0.54471950308083178, -4.241116532772751}},
  {3, {2.0, -1.0}, {-0.011048021337478924, -0.20171764724352422}, {0.1712259150092242, -0.28784880682315408}, {-1.2075674376181174, -1.3734814035732687}, {-0.66336049987809207, 1.9361189351844439}},
  {5, {10.0, 4.0}, {-5.8868343435887952, -15.591618824262939}, {-14.481893293692956, 3.8017080148336282}, {15.623460713088355, -5.8785374503885426}, {-3.8125109906494299, -14.453433678669072}},
  {7, {0.29999999999999999, 0.10000000000000001}, {-4.1453371539216194e-11, 2.6532505111402904e-11}, {-7.8173301080413692e-10, 9.6818282711456103e-10}, {269249157.17576731, 333537043.43357338}, {-7985345900.0392532, -5109758653.125141}},
  {10, {25.0, -3.0}, {-7.0376645081305221, -3.8714727267984112}, {3.4256095819010629, -6.4267895160718046}, {-3.9031657268423113, 6.9770855140528729}, {-6.481329966709972, -3.3950614349889858}},
  {10, {0.050000000000000003, 0.02}, {-4.0392796770626139e-25, -6.9438045025011487e-25}, {-1.2928389167354527e-22, -1.0104817189754029e-22}, {2.5151399612986258e+21, -1.9658260439489926e+21}, {-2.9806192283396944e+23, 5.1239092751090826e+23}},
  {4, {0.0, 6.0}, {0.0, 35.948166384229632}, {46.077358062999699, 0.0}, {-35.959280604058805, 0.0}, {0.0, 46.063786129785483}},
  {2, {40.0, 0.0}, {-0.69369571867953037, 0.0}, {0.72025067659822208, 0.0}, {-0.72157103982261501, 0.0}, {-0.69236115694691149, 0.0}},
};

}  // namespace

TEST_CASE("closed forms at special points") {
  CHECK(std::abs(riccati_j(0, M_PI / 2).value - 1.0) < 1e-15);
  CHECK(std::abs(riccati_j(1, M_PI).value - 1.0) < 1e-15);
  CHECK(std::abs(riccati_n(0, M_PI).value - 1.0) < 1e-15);
  CHECK(std::abs(riccati_n(1, M_PI / 2).value + 1.0) < 1e-15);
  CHECK(std::abs(riccati_n(1, M_PI).value - 1.0 / M_PI) < 1e-15);
}

TEST_CASE("regular function against the ascending series") {
  const cplx z{1.0, 0.5};
  CHECK(rel(riccati_j(2, z).value, series_j(2, z)) < 1e-12);
  for (int l = 0; l <= 10; ++l) {
    for (cplx w : {cplx{0.01, 0.0}, cplx{0.4, -0.2}, cplx{1.5, 1.0}}) {
      CAPTURE(l);
      CAPTURE(w);
      CHECK(rel(riccati_j(l, w).value, series_j(l, w, 40)) < 1e-12);
    }
  }
}

TEST_CASE("irregular function against the upward recurrence from l = 0, 1") {
  const cplx z{2.0, -1.0};
  cplx prev = -std::cos(z);
  cplx cur = -std::cos(z) / z - std::sin(z);
  for (int l = 1; l < 3; ++l) {
    const cplx next = (2.0 * l + 1.0) / z * cur - prev;
    prev = cur;
    cur = next;
  }
  CHECK(rel(riccati_n(3, z).value, cur) < 1e-12);
}

TEST_CASE("frozen high-precision values") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.l);
    CAPTURE(f.z);
    const auto j = riccati_j(f.l, f.z);
    const auto n = riccati_n(f.l, f.z);
    CHECK(rel(j.value, f.j) < 1e-12);
    CHECK(rel(j.derivative, f.dj) < 1e-12);
    CHECK(rel(n.value, f.n) < 1e-12);
    CHECK(rel(n.derivative, f.dn) < 1e-12);
    const auto hp = riccati_h(f.l, HankelSign::outgoing, f.z);
    const auto hm = riccati_h(f.l, HankelSign::incoming, f.z);
    // Compare against -n̂ ± iĵ only where neither side cancels.
    const cplx expect_p = -f.n + I * f.j;
    const cplx expect_m = -f.n - I * f.j;
    if (std::abs(expect_p) > 1e-3 * std::abs(f.n)) CHECK(rel(hp.value, expect_p) < 1e-12);
    if (std::abs(expect_m) > 1e-3 * std::abs(f.n)) CHECK(rel(hm.value, expect_m) < 1e-12);
  }
}

TEST_CASE("Hankel closed forms") {
  for (double x : {0.3, 1.0, 7.5}) {
    CHECK(rel(riccati_h(0, HankelSign::outgoing, x).value, std::exp(I * x)) < 1e-14);
    CHECK(rel(riccati_h(0, HankelSign::incoming, x).value, std::exp(-I * x)) < 1e-14);
  }
  for (cplx z : {cplx{0.5, 0.0}, cplx{2.0, 1.0}, cplx{1.0, -3.0}, cplx{0.0, 8.0}}) {
    CHECK(rel(riccati_h(1, HankelSign::outgoing, z).value, (1.0 / z - I) * std::exp(I * z)) < 1e-13);
  }
  const auto m = riccati_h(2, HankelSign::incoming, cplx{0.0, 3.0});
  const auto p = riccati_h(2, HankelSign::outgoing, cplx{0.0, 3.0});
  CHECK(std::abs(m.value * p.derivative - m.derivative * p.value - 2.0 * I) < 1e-10);
}

TEST_CASE("Wronskians over the annulus") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> modulus(0.1, 30.0), angle(-M_PI, M_PI);
  int used = 0;
  while (used < 100) {
    const cplx z = std::polar(modulus(rng), angle(rng));
    if (std::abs(z.imag()) > 10.0) continue;
    ++used;
    for (int l = 0; l <= 5; ++l) {
      CAPTURE(z);
      CAPTURE(l);
      const auto m = riccati_h(l, HankelSign::incoming, z);
      const auto p = riccati_h(l, HankelSign::outgoing, z);
      // Near the origin both products grow like z^{-2l-1} and cancel, so the
      // error is measured against their size.
      const cplx a = m.value * p.derivative, b = m.derivative * p.value;
      const double scale = std::max({2.0, std::abs(a), std::abs(b)});
      CHECK(std::abs(a - b - 2.0 * I) / scale < 1e-9);
      if (std::abs(z.imag()) < 5.0) {
        const auto j = riccati_j(l, z);
        const auto n = riccati_n(l, z);
        CHECK(std::abs(j.value * n.derivative - j.derivative * n.value - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("free radial equation by second differences") {
  // The stencil error is O(d²): halving d must cut it about fourfold.
  auto stencil_error = [](int l, HankelSign sign, cplx z, double d) {
    const cplx f0 = riccati_h(l, sign, z).value;
    const cplx second = (riccati_h(l, sign, z + d).value - 2.0 * f0 + riccati_h(l, sign, z - d).value) / (d * d);
    return std::abs(second - (l * (l + 1.0) / (z * z) - 1.0) * f0) / std::abs(f0);
  };
  for (int l = 0; l <= 4; ++l) {
    for (cplx z : {cplx{1.3, 0.2}, cplx{4.0, -1.0}, cplx{0.7, 2.0}}) {
      CAPTURE(l);
      CAPTURE(z);
      for (auto sign : {HankelSign::incoming, HankelSign::outgoing}) {
        const double coarse = stencil_error(l, sign, z, 4e-3);
        const double fine = stencil_error(l, sign, z, 2e-3);
        CHECK(coarse < 1e-2);
        if (coarse > 1e-9) {
          CHECK(coarse / fine > 3.5);
          CHECK(coarse / fine < 4.5);
        }
      }
    }
  }
}

TEST_CASE("conjugation symmetry on the real axis") {
  for (int l = 0; l <= 6; ++l) {
    for (double x : {0.2, 1.0, 3.3, 12.0}) {
      const cplx p = riccati_h(l, HankelSign::outgoing, x).value;
      const cplx m = riccati_h(l, HankelSign::incoming, x).value;
      CHECK(rel(m, std::conj(p)) < 1e-14);
    }
  }
}

TEST_CASE("growth bound on the regular function") {
  // |ĵ_l(z)| <= C e^{|Im z|} (|z| / (1 + |z|))^{l+1}; fit C on samples and
  // check it stays moderate.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-20.0, 20.0), im(-8.0, 8.0);
  for (int l = 0; l <= 3; ++l) {
    double c = 0.0;
    for (int i = 0; i < 400; ++i) {
      const cplx z{re(rng), im(rng)};
      const double bound = std::exp(std::abs(z.imag())) * std::pow(std::abs(z) / (1.0 + std::abs(z)), l + 1);
      c = std::max(c, std::abs(riccati_j(l, z).value) / bound);
    }
    CAPTURE(l);
    CHECK(c < 10.0);
  }
}

TEST_CASE("z = 0 policy and overflow") {
  for (int l = 0; l <= 3; ++l) {
    CHECK(riccati_j(l, 0.0).value == cplx{0.0, 0.0});
    CHECK_THROWS_AS(riccati_n(l, 0.0), ccres::Error);
    CHECK_THROWS_AS(riccati_h(l, HankelSign::outgoing, 0.0), ccres::Error);
  }
  CHECK(riccati_j(0, 0.0).derivative == cplx{1.0, 0.0});
  try {
    riccati_j(1, cplx{1.0, 800.0});
    FAIL("expected overflow");
  } catch (const ccres::Error& e) {
    CHECK(e.kind() == ccres::ErrorKind::overflow);
  }
  try {
    riccati_n(2, 0.0);
  } catch (const ccres::Error& e) {
    CHECK(e.kind() == ccres::ErrorKind::domain);
  }
}
