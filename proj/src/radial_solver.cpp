#include "ccres/radial_solver.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

#include "ccres/errors.hpp"
#include "ccres/special_functions.hpp"

namespace ccres {

void RadialGrid::validate() const {
  if (!(r_max > 0.0)) throw Error(ErrorKind::config, "grid.r_max: must be positive");
  if (n_points < 16) throw Error(ErrorKind::config, "grid.n_points: at least 16 points required");
}

RadialSolver::RadialSolver(PotentialModel model, RadialGrid grid, kernels::Backend backend)
    : model_(std::move(model)), grid_(grid), backend_(backend) {
  grid_.validate();
  const int n = model_.size();
  const int steps = grid_.n_points;
  const double h = grid_.step();
  tables_.channels = n;
  tables_.steps = steps;
  tables_.h = h;
  tables_.profile.resize(steps + 1);
  tables_.centrifugal.assign(static_cast<std::size_t>(steps + 1) * n, 0.0);
  tables_.origin_weight.resize(n);

  const auto jump = model_.discontinuity();
  for (int node = 0; node <= steps; ++node) {
    const double r = node * h;
    double g = model_.profile(r);
    // A node sitting on a jump takes the mean of the one-sided limits.
    if (jump && std::abs(r - *jump) <= 1e-9 * h) {
      g = 0.5 * (model_.profile(r - 0.5 * h) + model_.profile(r + 0.5 * h));
    }
    tables_.profile[node] = g;
    if (node == 0) continue;
    for (int i = 0; i < n; ++i) {
      const double l = model_.channels().l_values[i];
      tables_.centrifugal[static_cast<std::size_t>(node) * n + i] = l * (l + 1.0) / (r * r);
    }
  }
  for (int i = 0; i < n; ++i) {
    // Ψ ~ c r^{l+1}: F_0 = -(h²/12)(WΨ)(0) = -(h²/12)·2c = -Ψ(h)/6 for l = 1,
    // zero otherwise.
    tables_.origin_weight[i] = model_.channels().l_values[i] == 1 ? -1.0 / 6.0 : 0.0;
  }
  // Inside the outer part of the well both sweeps run in their dominant
  // direction for Im k > 0 and stay short in the tail for Im k < 0.
  const double range = model_.range_radius();
  const int node = range > 0.0 ? static_cast<int>(std::lround(0.4 * range / h)) : steps;
  tables_.match_node = std::clamp(node, 2, steps - 2);
}

void RadialSolver::check_point(const WavePoint& p) const {
  if (p.k == cplx{0.0, 0.0}) throw Error(ErrorKind::domain, "propagate: k = 0 is not evaluated");
  if (std::abs(p.k.imag()) * grid_.r_max > 700.0) {
    throw Error(ErrorKind::overflow, "propagate: exp(|Im k| r_max) is not representable");
  }
  const double needed = effective_range(model_, kGridCoverageTolerance, p.lambda);
  if (grid_.r_max < needed) {
    throw Error(ErrorKind::domain, "propagate: grid.r_max = " + std::to_string(grid_.r_max) +
                                       " does not cover the potential (needs " +
                                       std::to_string(needed) + ")");
  }
}

kernels::NumerovLane RadialSolver::make_lane(const WavePoint& p) const {
  const int n = model_.size();
  const Eigen::MatrixXd c = -2.0 * model_.channels().mu * model_.strengths(p.lambda);
  kernels::NumerovLane lane;
  lane.k = p.k;
  lane.coupling.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) lane.coupling[static_cast<std::size_t>(i) * n + j] = c(i, j);
  }
  return lane;
}

std::vector<kernels::NumerovLaneResult> RadialSolver::run(std::span<const WavePoint> points,
                                                         bool matched) const {
  const int n = model_.size();
  const int last = grid_.n_points;
  std::vector<kernels::NumerovLane> lanes;
  lanes.reserve(points.size());
  for (const auto& p : points) {
    check_point(p);
    lanes.push_back(make_lane(p));
    if (!matched) continue;
    // G_N = F_Φ,N-1 F_Φ,N^{-1} - I with Φ = Ĥ⁺, written so that the O(h)
    // difference is formed once from the Hankel values.
    Eigen::VectorXcd h1(n), h2(n);
    for (int i = 0; i < n; ++i) {
      const int l = model_.channels().l_values[i];
      h1(i) = riccati_h(l, HankelSign::outgoing, p.k * grid_.node(last - 1)).value;
      h2(i) = riccati_h(l, HankelSign::outgoing, p.k * grid_.node(last)).value;
    }
    const Eigen::MatrixXcd f1 = numerov_factor(last - 1, p);
    const Eigen::MatrixXcd f2 = numerov_factor(last, p);
    Eigen::MatrixXcd diff = (f1 - f2) * h1.asDiagonal();
    diff.diagonal() += (h1 - h2);
    diff += (f2 - Eigen::MatrixXcd::Identity(n, n)) * (h1 - h2).asDiagonal();
    const Eigen::MatrixXcd seed = diff * (f2 * h2.asDiagonal()).partialPivLu().inverse();
    auto& s = lanes.back().inward_seed;
    s.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(i) * n + j] = seed(i, j);
    }
  }
  std::vector<kernels::NumerovLaneResult> results(points.size());
  kernels::propagate_batch(tables_, lanes, results, backend_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!results[i].finite) {
      throw Error(ErrorKind::singular_matrix,
                  "propagate: singular renormalization step at k = (" +
                      std::to_string(points[i].k.real()) + ", " + std::to_string(points[i].k.imag()) +
                      ")");
    }
  }
  return results;
}

namespace {

Eigen::MatrixXcd from_row_major(const std::vector<cplx>& v, int n) {
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = v[static_cast<std::size_t>(r) * n + c];
  }
  return m;
}

}  // namespace

AsymptoticSample RadialSolver::to_sample(const kernels::NumerovLaneResult& r) const {
  const int n = model_.size();
  AsymptoticSample s;
  s.r1 = grid_.node(grid_.n_points - 1);
  s.r2 = grid_.node(grid_.n_points);
  s.psi1 = Eigen::MatrixXcd::Identity(n, n);
  s.psi2 = s.psi1 + from_row_major(r.deviation, n);
  return s;
}

std::vector<AsymptoticSample> RadialSolver::propagate(std::span<const WavePoint> points) const {
  const auto results = run(points, false);
  std::vector<AsymptoticSample> samples;
  samples.reserve(points.size());
  for (const auto& r : results) samples.push_back(to_sample(r));
  return samples;
}

std::vector<MatchedSample> RadialSolver::propagate_matched(std::span<const WavePoint> points) const {
  const auto results = run(points, true);
  const int n = model_.size();
  std::vector<MatchedSample> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = results[i];
    auto& m = out[i];
    m.asymptotic = to_sample(r);
    m.match_node = tables_.match_node;
    m.outward_match = from_row_major(r.outward_match, n);
    m.outward_last = from_row_major(r.outward_last, n);
    m.inward_match = from_row_major(r.inward_match, n);
    m.log_origin = r.log_origin;
    m.log_outward = r.log_outward;
    m.log_inward = r.log_inward;
    m.factor_first = numerov_factor(1, points[i]);
    m.factor_last1 = numerov_factor(grid_.n_points - 1, points[i]);
    m.factor_last2 = numerov_factor(grid_.n_points, points[i]);
  }
  return out;
}

Eigen::MatrixXcd RadialSolver::numerov_factor(int node, const WavePoint& p) const {
  const int n = model_.size();
  const double a = tables_.h * tables_.h / 12.0;
  const Eigen::MatrixXd c = -2.0 * model_.channels().mu * model_.strengths(p.lambda);
  Eigen::MatrixXcd f = (-a * tables_.profile[node] * c).cast<cplx>();
  for (int i = 0; i < n; ++i) {
    f(i, i) += 1.0 + a * p.k * p.k - a * tables_.centrifugal[static_cast<std::size_t>(node) * n + i];
  }
  return f;
}

AsymptoticSample RadialSolver::propagate(cplx k, double lambda) const {
  const WavePoint p{k, lambda};
  return std::move(propagate(std::span<const WavePoint>(&p, 1)).front());
}

AsymptoticSample propagate(const PotentialModel& model, cplx k, double lambda,
                           const RadialGrid& grid) {
  return RadialSolver(model, grid).propagate(k, lambda);
}

}  // namespace ccres
