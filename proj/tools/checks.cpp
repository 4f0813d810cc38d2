#include <fmt/format.h>
#include <fmt/ostream.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ccres/errors.hpp"
#include "ccres/oracles.hpp"
#include "ccres/rootfinding.hpp"
#include "ccres/scattering.hpp"
#include "commands.hpp"

namespace ccres::cli {

namespace {

constexpr double kUnitarityTol = 1e-7;
constexpr double kSymmetryTol = 1e-7;
constexpr double kInversionTol = 1e-5;
constexpr double kFreeTol = 1e-8;
constexpr double kSquareWellTol = 1e-8;
constexpr double kFdTol = 2e-3;
constexpr int kMinOrderPoints = 64;

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

bool is_free(const RunConfig& c) { return c.strengths.isZero(0.0); }

CheckOutcome unitarity(const ResidualEvaluator& ev, double lambda, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pick(0.1, 5.0);
  double worst = 0.0, symmetric = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXcd s = ev.smatrix(pick(rng), lambda).s;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(s.rows(), s.cols());
    worst = std::max(worst, max_abs(s * s.adjoint() - id));
    symmetric = std::max(symmetric, max_abs(s - s.transpose()));
  }
  const bool pass = worst <= kUnitarityTol && symmetric <= kSymmetryTol;
  return {"unitarity", pass,
          fmt::format("max|SS^+ - I| = {:.2e}, max|S - S^T| = {:.2e} over 50 real k", worst, symmetric)};
}

CheckOutcome inversion(const ResidualEvaluator& ev, double lambda, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> modulus(0.1, 3.0), angle(-M_PI, M_PI);
  double worst = 0.0;
  int used = 0;
  while (used < 20) {
    const cplx k = std::polar(modulus(rng), angle(rng));
    if (std::abs(k.imag()) > 1.0) continue;
    ++used;
    try {
      const Eigen::MatrixXcd s = ev.smatrix(k, lambda).s;
      const Eigen::MatrixXcd s_conj = ev.smatrix(std::conj(k), lambda).s;
      worst = std::max(worst, max_abs(s_conj.conjugate() - s.inverse()));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::singular_matrix) throw;
      --used;  // sampled on top of a pole
    }
  }
  return {"inversion_symmetry", worst <= kInversionTol,
          fmt::format("max|conj S(k*) - S(k)^-1| = {:.2e} over 20 complex k", worst)};
}

// Ratio of successive differences of S(k = 1) on n/4, n/2 and n points.
CheckOutcome convergence_order(const RunConfig& c) {
  if (c.family == PotentialFamily::square_well) {
    return {"convergence_order", true, "skipped: discontinuous potential (order 2 at the jump)"};
  }
  const int n = c.grid.n_points;
  if (n < 4 * kMinOrderPoints) {
    return {"convergence_order", false,
            fmt::format("n_points = {} is too coarse to resolve the order (needs >= {})", n,
                        4 * kMinOrderPoints)};
  }
  std::vector<Eigen::MatrixXcd> s;
  for (int divisor : {4, 2, 1}) {
    RadialGrid g = c.grid;
    g.n_points = n / divisor;
    s.push_back(ResidualEvaluator(c.model(), g).smatrix(1.0, c.lambda()).s);
  }
  const double d1 = max_abs(s[0] - s[1]);
  const double d2 = max_abs(s[1] - s[2]);
  if (d1 < 1e-12 && d2 < 1e-12) {
    return {"convergence_order", true, fmt::format("grid-independent S (differences {:.1e})", d1)};
  }
  const double ratio = d1 / d2;
  return {"convergence_order", ratio >= 8.0 && ratio <= 24.0,
          fmt::format("Richardson ratio {:.2f} (expected 16 +- 50%) for n = {}, {}, {}", ratio, n / 4,
                      n / 2, n)};
}

CheckOutcome free_identity(const ResidualEvaluator& ev, double lambda, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pick(0.1, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXcd s = ev.smatrix(pick(rng), lambda).s;
    worst = std::max(worst, max_abs(s - Eigen::MatrixXcd::Identity(s.rows(), s.cols())));
  }
  return {"oracle_free", worst <= kFreeTol, fmt::format("max|S - I| = {:.2e} over 20 real k", worst)};
}

CheckOutcome square_well_oracle(const RunConfig& c, const ResidualEvaluator& ev, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pick(0.1, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double k = pick(rng);
    const cplx pipeline = ev.smatrix(k, c.lambda()).s(0, 0);
    const cplx exact = oracles::square_well_smatrix(0, c.lambda(), c.well_radius, c.channels.mu, k);
    worst = std::max(worst, std::abs(pipeline - exact));
  }
  return {"oracle_square_well", worst <= kSquareWellTol,
          fmt::format("max|S - S_exact| = {:.2e} over 20 real k", worst)};
}

CheckOutcome fd_oracle(const RunConfig& c, const ResidualEvaluator& ev) {
  const auto roots = scan_bound_states(ev, c.lambda(), c.scan_k_max, c.newton);
  const double r_max = std::max(20.0, 4.0 * c.grid.r_max);
  const auto fd = oracles::fd_bound_states(c.model(), c.lambda(), 20000, r_max);
  std::vector<cplx> reference;
  for (const cplx& k : fd.bound_k) {
    if (k.imag() > 0.05 && k.imag() <= c.scan_k_max) reference.push_back(k);
  }
  if (reference.size() != roots.size()) {
    return {"oracle_finite_difference", false,
            fmt::format("{} bound states from the scan, {} from finite differences", roots.size(),
                        reference.size())};
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i) worst = std::max(worst, std::abs(roots[i].k - reference[i]));
  return {"oracle_finite_difference", worst <= kFdTol,
          fmt::format("{} bound states, max|k - k_fd| = {:.2e}", roots.size(), worst)};
}

}  // namespace

std::vector<CheckOutcome> run_checks(const RunConfig& config, bool verbose, std::ostream& log) {
  std::mt19937_64 rng(config.seed);
  const ResidualEvaluator ev(config.model(), config.grid);
  const double lambda = config.lambda();

  std::vector<CheckOutcome> out;
  auto run = [&](const char* name, auto&& suite) {
    try {
      out.push_back(suite());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::config) throw;
      out.push_back({name, false, fmt::format("{} error: {}", to_string(e.kind()), e.what())});
    }
    if (verbose) fmt::print(log, "  ran {}\n", out.back().name);
  };
  run("unitarity", [&] { return unitarity(ev, lambda, rng); });
  run("inversion_symmetry", [&] { return inversion(ev, lambda, rng); });
  run("convergence_order", [&] { return convergence_order(config); });
  if (is_free(config)) {
    run("oracle_free", [&] { return free_identity(ev, lambda, rng); });
  } else if (config.family == PotentialFamily::square_well && config.channels.size() == 1 &&
             config.channels.l_values[0] == 0) {
    run("oracle_square_well", [&] { return square_well_oracle(config, ev, rng); });
  } else if (config.family == PotentialFamily::gaussian) {
    run("oracle_finite_difference", [&] { return fd_oracle(config, ev); });
  }
  return out;
}

}  // namespace ccres::cli
