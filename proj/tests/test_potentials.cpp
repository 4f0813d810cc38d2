#include <doctest.h>

#include <cmath>
#include <random>

#include "ccres/errors.hpp"
#include "ccres/potentials.hpp"
#include "fixtures.hpp"

using namespace ccres;

TEST_CASE("gaussian entries") {
  const auto m = fixtures::sp_system();
  CHECK(m.evaluate(0.0, 20.0)(0, 0) == doctest::Approx(-7.0).epsilon(1e-15));
  CHECK(m.evaluate(1.0, 20.0)(0, 1) == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(m.evaluate(0.0, 13.0)(1, 1) == doctest::Approx(-13.0));
  CHECK(m.evaluate(2.0, 20.0).isApprox(-std::exp(-4.0) * fixtures::matrix2(7, 0.5, 20)));
}

TEST_CASE("parameter entry and its mirror") {
  const PotentialModel m(ChannelSet{{0, 1}, 1.0}, fixtures::matrix2(7, 0.5, 20), PotentialFamily::gaussian,
                         ParameterIndex{0, 1});
  const auto s = m.strengths(2.5);
  CHECK(s(0, 1) == 2.5);
  CHECK(s(1, 0) == 2.5);
  CHECK(m.with_parameter(1.5).parameter() == 1.5);
}

TEST_CASE("square well") {
  const auto m = fixtures::square_well(3.0, 1.5);
  CHECK(m.evaluate(1.49, 3.0)(0, 0) == -3.0);
  CHECK(m.evaluate(1.51, 3.0)(0, 0) == 0.0);
  CHECK(m.discontinuity().value() == 1.5);
  CHECK(effective_range(m, 1e-9) == 1.5);
  CHECK(effective_range(fixtures::square_well(3.0, 1.0), 1e-12) == 1.0);
}

TEST_CASE("effective range") {
  CHECK(effective_range(fixtures::single(0, 7.0), 1e-12) == doctest::Approx(std::sqrt(std::log(7e12))).epsilon(1e-12));
  CHECK(effective_range(fixtures::single(0, 7.0), 1e-12) == doctest::Approx(5.44).epsilon(1e-3));
  // The default grid covers every strength used by the examples.
  CHECK(effective_range(fixtures::pd_system(), kGridCoverageTolerance, 30.0) <= 4.6);
  const auto m = fixtures::sp_system();
  const double r = m.range_radius();
  CHECK(m.evaluate(r, m.parameter()).cwiseAbs().maxCoeff() <= 1e-12 * (1 + 1e-12));
  CHECK(m.evaluate(r + 3.0, m.parameter()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(effective_range(PotentialModel::free(ChannelSet{{0}, 1.0}), 1e-9) == 0.0);
  CHECK_THROWS_AS(effective_range(m, 0.0), Error);
}

TEST_CASE("symmetry and monotone decay on random samples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.0, 6.0), lam(-40.0, 40.0);
  const auto m = fixtures::sp_system();
  for (int i = 0; i < 1000; ++i) {
    const double a = r(rng), b = r(rng), l = lam(rng);
    const auto va = m.evaluate(std::min(a, b), l);
    const auto vb = m.evaluate(std::max(a, b), l);
    CHECK(va.isApprox(va.transpose(), 0.0));
    CHECK((vb.cwiseAbs().array() <= va.cwiseAbs().array()).all());
  }
}

TEST_CASE("validation names the offending field") {
  auto expect = [](auto&& make, const char* field) {
    try {
      make();
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  expect([] { ChannelSet{{}, 1.0}.validate(); }, "channels.l");
  expect([] { ChannelSet{{-1}, 1.0}.validate(); }, "channels.l");
  expect([] { ChannelSet{{0}, 0.0}.validate(); }, "channels.mu");
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 3, 4;
  expect([&] { PotentialModel(ChannelSet{{0, 1}, 1.0}, asym, PotentialFamily::gaussian, {0, 0}); },
         "potential.strengths");
  expect([] { PotentialModel(ChannelSet{{0}, 1.0}, Eigen::MatrixXd::Ones(2, 2), PotentialFamily::gaussian, {0, 0}); },
         "potential.strengths");
  expect([] { PotentialModel(ChannelSet{{0}, 1.0}, Eigen::MatrixXd::Ones(1, 1), PotentialFamily::gaussian, {1, 0}); },
         "potential.parameter");
  expect([] { PotentialModel(ChannelSet{{0}, 1.0}, Eigen::MatrixXd::Ones(1, 1), PotentialFamily::square_well, {0, 0}, 0.0); },
         "potential.radius");
}
