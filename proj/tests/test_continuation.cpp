#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "ccres/continuation.hpp"
#include "ccres/errors.hpp"
#include "fixtures.hpp"

using namespace ccres;

namespace {

ContinuationSystem polynomial(std::function<Eigen::Vector2d(const Vec3&)> f) {
  return ContinuationSystem([f](const std::vector<Vec3>& xs) {
    std::vector<Eigen::Vector2d> out;
    for (const auto& x : xs) out.push_back(f(x));
    return out;
  });
}

ContinuationOptions unbounded() {
  ContinuationOptions o;
  o.lambda_min = -1e300;
  return o;
}

const ContinuationSystem& sp_system() {
  static const ContinuationSystem g =
      ContinuationSystem::from_residual(ResidualEvaluator(fixtures::sp_system(), fixtures::default_grid()));
  return g;
}

/// The weakest s/p state traced from λ = 20 down to 17.3, across its threshold.
const Branch& threshold_branch() {
  static const Branch branch = [] {
    const ResidualEvaluator ev(fixtures::sp_system(), fixtures::default_grid());
    ContinuationOptions o;
    o.lambda_min = 17.3;
    const auto start = newton_complex(ev, 20.0, {0.0, 0.9035}, {1e-10, 60});
    return trace_branch(sp_system(), Vec3(0.0, start.k.imag(), 20.0), -1, o);
  }();
  return branch;
}

const ContinuationPoint* find_branch_point(const Branch& b) {
  for (const auto& p : b.points) {
    if (p.flag == PointFlag::branch_point) return &p;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("finite-difference Jacobian of a polynomial map") {
  const auto g = polynomial([](const Vec3& x) { return Eigen::Vector2d(x(0) * x(0) - x(2), x(1)); });
  for (const Vec3& x : {Vec3(0.3, -1.0, 2.0), Vec3(-2.0, 0.5, 0.0), Vec3(10.0, 3.0, -4.0)}) {
    Jacobian exact;
    exact << 2.0 * x(0), 0.0, -1.0, 0.0, 1.0, 0.0;
    CHECK((jacobian(g, x) - exact).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("straight solution set needs a single corrector pass") {
  const auto g = polynomial([](const Vec3& x) { return Eigen::Vector2d(x(0) - x(2), x(1)); });
  ContinuationPoint p;
  p.x = Vec3(0.2, 0.0, 0.2);
  p.tangent = Vec3(1.0, 0.0, 1.0).normalized();
  p.jacobian = jacobian(g, p.x);
  CorrectorStats stats;
  const auto next = predict_correct(g, p, 0.01, unbounded(), &stats);
  CHECK(stats.iterations <= 1);
  CHECK((next.x - (p.x + 0.01 * p.tangent)).norm() < 1e-14);
  CHECK((next.tangent - p.tangent).norm() < 1e-9);
}

TEST_CASE("pitchfork: branch point at the origin and the crossing tangent") {
  const auto g = polynomial([](const Vec3& x) { return Eigen::Vector2d(x(0) * x(0) - x(2) * x(0), x(1)); });
  auto o = unbounded();
  o.lambda_max = 0.3;
  const Branch b = trace_branch(g, Vec3(0.0, 0.0, -0.4), +1, o);
  const auto* bp = find_branch_point(b);
  REQUIRE(bp != nullptr);
  CHECK(bp->x.norm() < 1e-6);

  const auto dirs = switch_branch(g, *bp);
  REQUIRE(dirs.size() == 2);
  CHECK((dirs[0] + dirs[1]).norm() < 1e-12);
  CHECK(std::abs(dirs[0].dot(bp->tangent)) < 1e-6);

  auto short_run = o;
  short_run.max_points = 6;
  short_run.lambda_max = 1.0;
  const Vec3 crossing = Vec3(1.0, 0.0, 1.0).normalized();
  for (const auto& d : dirs) {
    const Branch sw = trace_branch(g, bp->x, +1, short_run, d);
    REQUIRE(sw.points.size() >= 3);
    const Vec3 t = sw.points[2].tangent;
    CHECK(std::acos(std::min(1.0, std::abs(t.dot(crossing)))) < 1e-4);
  }
}

TEST_CASE("regular point of the coupled system has a rank-2 Jacobian") {
  const Jacobian j = jacobian(sp_system(), Vec3(0.0, 2.178012, 20.0));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(j)};
  CHECK(svd.singularValues()(1) > 1e-8 * svd.singularValues()(0));
}

TEST_CASE("tracing the weakest s/p state through its threshold") {
  const Branch& b = threshold_branch();
  REQUIRE(b.points.size() > 10);
  CHECK(b.points.front().flag == PointFlag::start);
  CHECK(b.points.back().flag == PointFlag::boundary);

  const auto* bp = find_branch_point(b);
  REQUIRE(bp != nullptr);
  CHECK(std::abs(bp->x(2) - 17.42094) < 0.05);
  CHECK(std::abs(bp->x(0)) < 1e-6);
  CHECK(std::abs(bp->x(1) - (-1.5893e-2)) < 5e-3);

  const ContinuationOptions o;
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& p = b.points[i];
    CAPTURE(i);
    if (p.flag != PointFlag::boundary) CHECK(p.residual_norm <= o.tol);
    CHECK(std::abs(p.tangent.norm() - 1.0) < 1e-12);
    if (i == 0) continue;
    const auto& q = b.points[i - 1];
    CHECK(q.tangent.dot(p.tangent) > 0.0);
    if (p.flag != PointFlag::branch_point && q.flag != PointFlag::branch_point && p.flag != PointFlag::boundary) {
      const double step = (p.x - q.x).norm();
      CHECK(step >= 0.5 * o.h_min);
      CHECK(step <= 1.5 * o.h_max);
    }
  }
}

TEST_CASE("bordered determinant changes sign across the threshold") {
  const Branch& b = threshold_branch();
  std::size_t at = 0;
  while (at < b.points.size() && b.points[at].flag != PointFlag::branch_point) ++at;
  REQUIRE(at > 0);
  REQUIRE(at + 1 < b.points.size());
  const auto& before = b.points[at - 1];
  const auto& after = b.points[at + 1];
  const double tau_before = bordered_determinant(jacobian(sp_system(), before.x), before.tangent);
  const double tau_after = bordered_determinant(jacobian(sp_system(), after.x), after.tangent);
  CHECK(tau_before * tau_after < 0.0);

  // Away from the threshold the sign holds.
  const auto& p1 = b.points[1];
  const auto& p2 = b.points[2];
  CHECK_FALSE(detect_branch_point(sp_system(), p1, p2, ContinuationOptions{}).has_value());
}

TEST_CASE("switching at the threshold yields mirrored resonance branches") {
  const auto* bp = find_branch_point(threshold_branch());
  REQUIRE(bp != nullptr);
  const auto dirs = switch_branch(sp_system(), *bp);
  REQUIRE(dirs.size() == 2);

  ContinuationOptions o;
  o.lambda_min = 17.0;
  o.max_points = 25;
  std::vector<Branch> switched;
  for (const auto& d : dirs) switched.push_back(trace_branch(sp_system(), bp->x, -1, o, d));

  int fourth = -1;
  for (int s = 0; s < 2; ++s) {
    const auto& last = switched[s].points.back();
    CHECK(last.x(1) < 0.0);
    CHECK(last.x(2) < bp->x(2));
    if (last.x(0) > 0.0) fourth = s;
  }
  REQUIRE(fourth >= 0);
  const auto& right = switched[fourth];
  const auto& left = switched[1 - fourth];
  CHECK(left.points.back().x(0) < 0.0);

  const std::size_t n = std::min(right.points.size(), left.points.size());
  CHECK(n > 10);
  for (std::size_t i = 0; i < n; ++i) {
    CAPTURE(i);
    const Vec3& a = right.points[i].x;
    const Vec3& c = left.points[i].x;
    CHECK(std::abs(a(0) + c(0)) < 1e-4);
    CHECK(std::abs(a(1) - c(1)) < 1e-4);
    CHECK(std::abs(a(2) - c(2)) < 1e-4);
    if (right.points[i].flag != PointFlag::boundary) CHECK(right.points[i].residual_norm <= o.tol);
  }
}

TEST_CASE("reversibility with a fixed step") {
  ContinuationOptions o;
  o.h_min = o.h_max = o.h_initial = 1e-3;
  o.max_points = 21;
  o.detect_branch_points = false;
  const Vec3 start(0.0, 2.1780124, 20.0);
  const Branch out = trace_branch(sp_system(), start, -1, o);
  REQUIRE(out.points.size() == 21);
  const auto& turn = out.points.back();
  const Branch back = trace_branch(sp_system(), turn.x, +1, o, Vec3(-turn.tangent));
  REQUIRE(back.points.size() == 21);
  CHECK((back.points.back().x - out.points.front().x).norm() < 1e-4);
}

TEST_CASE("avoided crossing: the slope of Im k dips near 2.2i") {
  ContinuationOptions o;
  o.lambda_min = 10.0;
  const Branch b = trace_branch(sp_system(), Vec3(0.0, 2.1780124, 20.0), -1, o);
  REQUIRE(b.points.back().x(2) <= 10.0 + 1e-9);

  double min_slope = HUGE_VAL, max_slope = 0.0, k_at_min = 0.0;
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    const Vec3 d = b.points[i].x - b.points[i - 1].x;
    if (std::abs(d(2)) < 1e-6) continue;
    const double slope = d(1) / d(2);
    CHECK(slope > 0.0);  // Im k grows with the well depth
    if (std::abs(slope) < min_slope) {
      min_slope = std::abs(slope);
      k_at_min = 0.5 * (b.points[i].x(1) + b.points[i - 1].x(1));
    }
    max_slope = std::max(max_slope, std::abs(slope));
  }
  CAPTURE(min_slope);
  CAPTURE(max_slope);
  CAPTURE(k_at_min);
  CHECK(std::abs(k_at_min - 2.2) < 0.1);
  CHECK(min_slope < 0.25 * max_slope);
}

TEST_CASE("degenerate intervals and flags") {
  ContinuationOptions o;
  o.lambda_min = o.lambda_max = 20.0;
  for (int direction : {-1, +1}) {
    const Branch b = trace_branch(sp_system(), Vec3(0.0, 2.1780124, 20.0), direction, o);
    CHECK(b.points.size() == 1);
    CHECK(b.points.front().flag == PointFlag::start);
  }
  CHECK(std::string(to_string(PointFlag::branch_point)) == "branch_point");
  CHECK(std::string(to_string(PointFlag::boundary)) == "boundary");
}
