#include <doctest.h>

#include <cmath>
#include <random>

#include "ccres/errors.hpp"
#include "ccres/oracles.hpp"
#include "fixtures.hpp"

using namespace ccres;
using oracles::cplx;

namespace {

// 1/S(iy) is real and continuous through the poles of S; a zero of it for
// y > 0 is a bound state of the well.
double inverse_s(double depth, double y) { return (1.0 / oracles::square_well_smatrix(0, depth, 1.0, 1.0, {0.0, y})).real(); }

bool has_bound_state(double depth) {
  std::vector<double> ys;
  for (int i = 0; i <= 160; ++i) ys.push_back(1e-10 * std::pow(10.0, i / 20.0));  // up to 1e-2
  const double top = std::sqrt(2.0 * depth);
  for (int i = 1; i <= 400; ++i) ys.push_back(1e-2 + (top - 1e-2) * i / 401.0);
  for (std::size_t i = 1; i < ys.size(); ++i) {
    double a = ys[i - 1], b = ys[i];
    double fa = inverse_s(depth, a);
    if ((fa < 0.0) == (inverse_s(depth, b) < 0.0)) continue;
    for (int it = 0; it < 80; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = inverse_s(depth, m);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    if (std::abs(inverse_s(depth, 0.5 * (a + b))) < 1e-6) return true;  // a zero, not a pole of 1/S
  }
  return false;
}

}  // namespace

TEST_CASE("square well closed form") {
  SUBCASE("vanishing depth is free") {
    for (double k : {0.1, 1.0, 4.0}) {
      CHECK(std::abs(oracles::square_well_smatrix(0, 0.0, 1.0, 1.0, k) - 1.0) < 1e-12);
      CHECK(std::abs(oracles::square_well_smatrix(0, 1e-12, 1.0, 1.0, k) - 1.0) < 1e-10);
    }
  }
  SUBCASE("unitary on the real axis") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> k(0.01, 10.0), depth(0.0, 30.0), radius(0.2, 3.0);
    for (int i = 0; i < 200; ++i) {
      CHECK(std::abs(std::abs(oracles::square_well_smatrix(0, depth(rng), radius(rng), 1.0, k(rng))) - 1.0) < 1e-12);
    }
  }
  SUBCASE("first bound state appears at depth pi^2/8") {
    CHECK_FALSE(has_bound_state(1.0));
    CHECK(has_bound_state(1.5));
    double lo = 1.0, hi = 1.5;
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      (has_bound_state(mid) ? hi : lo) = mid;
    }
    CHECK(std::abs(lo - M_PI * M_PI / 8.0) < 1e-6);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(oracles::square_well_smatrix(1, 1.0, 1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(oracles::square_well_smatrix(0, 1.0, 0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(oracles::square_well_smatrix(0, 1.0, 1.0, 1.0, 0.0), Error);
  }
}

TEST_CASE("banded bisection matches dense diagonalization") {
  for (const auto& model : {fixtures::sp_system(), fixtures::pd_system(), fixtures::single(1, 20.0)}) {
    const auto banded = oracles::fd_bound_states(model, model.parameter(), 300, 8.0);
    const auto dense = oracles::fd_bound_states_dense(model, model.parameter(), 300, 8.0);
    REQUIRE(banded.bound_k.size() == dense.bound_k.size());
    for (std::size_t i = 0; i < dense.bound_k.size(); ++i) {
      CHECK(std::abs(banded.bound_k[i] - dense.bound_k[i]) < 1e-9);
    }
    CHECK(banded.h == doctest::Approx(8.0 / 301));
  }
}

TEST_CASE("finite-difference spectra of the coupled systems") {
  SUBCASE("p/d") {
    const auto fd = oracles::fd_bound_states(fixtures::pd_system(), 30.0, 20000, 20.0);
    REQUIRE(fd.bound_k.size() == 3);
    const double reference[] = {3.796532, 1.600127, 0.6603354};
    for (int i = 0; i < 3; ++i) CHECK(std::abs(fd.bound_k[i] - cplx{0.0, reference[i]}) < 2e-3);
  }
  SUBCASE("s/p") {
    const auto fd = oracles::fd_bound_states(fixtures::sp_system(), 20.0, 20000, 20.0);
    REQUIRE(fd.bound_k.size() == 3);
    CHECK(std::abs(fd.bound_k[0] - cplx{0.0, 3.623677}) < 2e-3);
    // The middle state is measured against the converged Numerov root.
    CHECK(std::abs(fd.bound_k[1] - cplx{0.0, 2.178012}) < 2e-3);
    CHECK(std::abs(fd.bound_k[2] - cplx{0.0, 0.9039594}) < 2e-3);
  }
  SUBCASE("every entry lies on the positive imaginary axis") {
    for (const auto& model : {fixtures::sp_system(), fixtures::pd_system()}) {
      const auto fd = oracles::fd_bound_states(model, model.parameter(), 2000, 12.0);
      for (std::size_t i = 0; i < fd.bound_k.size(); ++i) {
        CHECK(fd.bound_k[i].real() == 0.0);
        CHECK(fd.bound_k[i].imag() > 0.0);
        if (i > 0) CHECK(fd.bound_k[i].imag() < fd.bound_k[i - 1].imag());
      }
    }
  }
  SUBCASE("second-order convergence") {
    const auto model = fixtures::single(0, 7.0);
    std::vector<double> y;
    for (int n : {999, 1999, 3999}) y.push_back(oracles::fd_bound_states(model, 7.0, n, 10.0).bound_k[0].imag());
    const double ratio = (y[0] - y[1]) / (y[1] - y[2]);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("finite-difference edge cases") {
  CHECK(oracles::fd_bound_states(PotentialModel::free(ChannelSet{{0, 1}, 1.0}), 0.0, 500, 10.0).bound_k.empty());
  try {
    oracles::fd_bound_states(fixtures::sp_system(), 20.0, 199, 10.0);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
  CHECK_THROWS_AS(oracles::fd_bound_states(fixtures::sp_system(), 20.0, 500, 0.0), Error);
}
