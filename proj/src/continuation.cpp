#include "ccres/continuation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>

#include "ccres/errors.hpp"
#include "ccres/numerics.hpp"

namespace ccres {

const char* to_string(PointFlag flag) noexcept {
  switch (flag) {
    case PointFlag::regular: return "regular";
    case PointFlag::start: return "start";
    case PointFlag::branch_point: return "branch_point";
    case PointFlag::boundary: return "boundary";
  }
  return "unknown";
}

namespace {

constexpr double kJacobianStep = 1e-6;
constexpr double kMinAbsK = 1e-9;
constexpr int kMaxRefinements = 20;
constexpr double kBranchArclength = 1e-4;
constexpr double kNullspaceRatio = 1e-3;
constexpr double kMinTangentDot = 0.8;
constexpr double kChordRcond = 1e-10;

using Mat3 = Eigen::Matrix3d;

Mat3 bordered(const Jacobian& j, const Vec3& t) {
  Mat3 b;
  b.topRows<2>() = j;
  b.row(2) = t.transpose();
  return b;
}

}  // namespace

ContinuationSystem ContinuationSystem::from_residual(ResidualEvaluator residual) {
  return ContinuationSystem([r = std::move(residual)](const std::vector<Vec3>& xs) {
    std::vector<WavePoint> pts;
    pts.reserve(xs.size());
    for (const auto& x : xs) {
      cplx k{x(0), x(1)};
      if (std::abs(k) < kMinAbsK) {
        k = std::abs(k) > 0.0 ? k * (kMinAbsK / std::abs(k)) : cplx{0.0, kMinAbsK};
      }
      pts.push_back({k, x(2)});
    }
    const auto vals = r.evaluate(pts);
    std::vector<Eigen::Vector2d> out;
    out.reserve(vals.size());
    for (const auto& v : vals) out.emplace_back(v.det_f.real(), v.det_f.imag());
    return out;
  });
}

Jacobian jacobian(const ContinuationSystem& g, const Vec3& x) {
  std::vector<Vec3> pts;
  std::array<double, 3> steps{};
  for (int i = 0; i < 3; ++i) {
    steps[i] = kJacobianStep * std::max(1.0, std::abs(x(i)));
    Vec3 p = x;
    p(i) += steps[i];
    pts.push_back(p);
    p(i) = x(i) - steps[i];
    pts.push_back(p);
  }
  const auto vals = g.evaluate(pts);
  Jacobian j;
  for (int i = 0; i < 3; ++i) j.col(i) = (vals[2 * i] - vals[2 * i + 1]) / (2.0 * steps[i]);
  return j;
}

Vec3 null_tangent(const Jacobian& j, const Vec3& orient) {
  Vec3 t = Vec3(j.row(0)).cross(Vec3(j.row(1)));
  const double norm = t.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::degenerate, "null_tangent: Jacobian rows are parallel");
  }
  t /= norm;
  if (t.dot(orient) < 0.0) t = -t;
  return t;
}

double bordered_determinant(const Jacobian& j, const Vec3& t) { return bordered(j, t).determinant(); }

namespace {

struct Corrected {
  ContinuationPoint point;
  Jacobian j;
  CorrectorStats stats;
};

bool converged(const Eigen::Vector2d& g, const Vec3& delta, const ContinuationOptions& o) {
  return g.norm() <= o.tol && delta.norm() <= o.step_tol;
}

// Newton on [G(x); nᵀ(x - anchor)] = 0 from `guess`. Starts with the chord
// matrix built from `chord` (if given) and switches to fresh Jacobians when
// the residual stops shrinking.
Corrected correct(const ContinuationSystem& g, const Vec3& guess, const Vec3& anchor, const Vec3& n,
                  const Jacobian* chord, const ContinuationOptions& o) {
  Vec3 x = guess;
  Eigen::Vector2d gx = g(x);
  bool fresh = chord == nullptr;
  Eigen::PartialPivLU<Mat3> lu;
  if (!fresh) {
    lu.compute(bordered(*chord, n));
    // A chord taken at a branch point is singular along the new direction.
    if (!(lu.rcond() > kChordRcond)) fresh = true;
  }
  auto accept = [&](int it) {
    Corrected c;
    c.j = jacobian(g, x);
    c.point.x = x;
    c.point.residual_norm = gx.norm();
    c.stats = {it, fresh};
    return c;
  };
  double last_norm = gx.norm();
  for (int it = 1; it <= o.max_corrector_iter; ++it) {
    if (fresh) lu.compute(bordered(jacobian(g, x), n));
    Eigen::Vector3d rhs;
    rhs << -gx, -n.dot(x - anchor);
    const Vec3 delta = lu.solve(rhs);
    if (!delta.allFinite()) {
      // Sitting exactly on a branch point leaves the bordered matrix singular.
      if (fresh && gx.norm() <= o.tol && n.dot(x - anchor) == 0.0) return accept(it);
      if (fresh) break;
      fresh = true;
      continue;
    }
    x += delta;
    gx = g(x);
    if (converged(gx, delta, o)) return accept(it);
    if (!fresh && !(gx.norm() < 0.5 * last_norm)) fresh = true;
    last_norm = gx.norm();
  }
  throw Error(ErrorKind::no_convergence, "corrector did not converge");
}

const Jacobian& jacobian_of(const ContinuationSystem& g, ContinuationPoint& p) {
  if (!p.jacobian.allFinite()) p.jacobian = jacobian(g, p.x);
  return p.jacobian;
}

ContinuationPoint finish(Corrected& c, const Vec3& orient, PointFlag flag) {
  c.point.jacobian = c.j;
  c.point.tangent = null_tangent(c.j, orient);
  c.point.flag = flag;
  return c.point;
}

}  // namespace

ContinuationPoint correct_point(const ContinuationSystem& g, const Vec3& guess, const Vec3& normal,
                                const ContinuationOptions& options) {
  Corrected c = correct(g, guess, guess, normal, nullptr, options);
  return finish(c, normal, PointFlag::regular);
}

ContinuationPoint predict_correct(const ContinuationSystem& g, const ContinuationPoint& current,
                                  double h, const ContinuationOptions& options,
                                  CorrectorStats* stats) {
  if (h < options.h_min) throw Error(ErrorKind::step_underflow, "predict_correct: h below h_min");
  const Vec3 predicted = current.x + h * current.tangent;
  const Jacobian j0 = current.jacobian.allFinite() ? current.jacobian : jacobian(g, current.x);
  Corrected c = correct(g, predicted, predicted, current.tangent, &j0, options);
  if (stats != nullptr) *stats = c.stats;
  return finish(c, current.tangent, PointFlag::regular);
}

namespace {

struct Sample {
  ContinuationPoint point;
  Jacobian j;
  double tau = 0.0;
};

// Point on the branch at arclength offset s from `from` along its tangent.
Sample sample_along(const ContinuationSystem& g, const ContinuationPoint& from, double s,
                    const ContinuationOptions& o) {
  const Vec3 guess = from.x + s * from.tangent;
  Corrected c = correct(g, guess, guess, from.tangent, nullptr, o);
  Sample out;
  out.j = c.j;
  out.point = finish(c, from.tangent, PointFlag::regular);
  out.tau = bordered_determinant(out.j, out.point.tangent);
  return out;
}

}  // namespace

std::optional<ContinuationPoint> detect_branch_point(const ContinuationSystem& g,
                                                     const ContinuationPoint& prev,
                                                     const ContinuationPoint& next,
                                                     const ContinuationOptions& options) {
  ContinuationPoint p = prev;
  ContinuationPoint q = next;
  const double tau_prev = bordered_determinant(jacobian_of(g, p), prev.tangent);
  const double tau_next = bordered_determinant(jacobian_of(g, q), next.tangent);
  if ((tau_prev < 0.0) == (tau_next < 0.0)) return std::nullopt;

  double a = 0.0;
  double b = prev.tangent.dot(next.x - prev.x);
  double fa = tau_prev;
  double fb = tau_next;
  ContinuationPoint best = std::abs(fa) < std::abs(fb) ? prev : next;
  double best_tau = std::min(std::abs(fa), std::abs(fb));
  const double tau_floor = 1e-12 * std::max(std::abs(fa), std::abs(fb));
  int side = 0;
  for (int it = 0; it < kMaxRefinements && std::abs(b - a) > kBranchArclength && best_tau > tau_floor;
       ++it) {
    double s = (a * fb - b * fa) / (fb - fa);
    // Keep secant steps strictly inside the bracket.
    const double margin = 0.05 * (b - a);
    s = std::clamp(s, a + margin, b - margin);
    Sample m;
    try {
      m = sample_along(g, prev, s, options);
    } catch (const Error&) {
      s = 0.5 * (a + b);
      m = sample_along(g, prev, s, options);
    }
    if (std::abs(m.tau) < best_tau) {
      best = m.point;
      best_tau = std::abs(m.tau);
    }
    if ((m.tau < 0.0) == (fb < 0.0)) {
      b = s;
      fb = m.tau;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = s;
      fa = m.tau;
      if (side == +1) fb *= 0.5;
      side = +1;
    }
  }
  best.flag = PointFlag::branch_point;
  return best;
}

std::vector<Vec3> switch_branch(const ContinuationSystem& g, const ContinuationPoint& bp) {
  const Jacobian j = jacobian(g, bp.x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (!(sv(1) < kNullspaceRatio * sv(0))) {
    throw Error(ErrorKind::degenerate,
                "switch_branch: Jacobian null space is one-dimensional (not a simple branch point)");
  }
  const Vec3 v1 = svd.matrixV().col(1);
  const Vec3 v2 = svd.matrixV().col(2);
  Vec3 w = v2.dot(bp.tangent) * v1 - v1.dot(bp.tangent) * v2;
  w.normalize();
  return {w, -w};
}

Branch trace_branch(const ContinuationSystem& g, const Vec3& start, int direction,
                    const ContinuationOptions& o, const std::optional<Vec3>& initial_tangent) {
  Branch branch;
  ContinuationPoint current;
  if (initial_tangent) {
    current.x = start;
    current.tangent = initial_tangent->normalized();
    current.residual_norm = g(start).norm();
  } else {
    // Converge in k at fixed λ, then orient by the requested dλ sign.
    Corrected c = correct(g, start, start, Vec3::UnitZ(), nullptr, o);
    current = finish(c, Vec3(0.0, 0.0, direction >= 0 ? 1.0 : -1.0), PointFlag::start);
  }
  current.flag = PointFlag::start;
  branch.points.push_back(current);
  if ((current.tangent(2) < 0.0 && current.x(2) <= o.lambda_min) ||
      (current.tangent(2) > 0.0 && current.x(2) >= o.lambda_max)) {
    return branch;
  }

  double tau_current =
      initial_tangent ? 0.0 : bordered_determinant(jacobian_of(g, current), current.tangent);
  double h = std::clamp(o.h_initial, o.h_min, o.h_max);
  int fast_streak = 0;
  // A switching direction is only a hint; the first step may turn sharply
  // onto the crossing branch.
  bool hinted = initial_tangent.has_value();
  while (static_cast<int>(branch.points.size()) < o.max_points) {
    ContinuationPoint next;
    CorrectorStats stats;
    bool ok = false;
    try {
      next = predict_correct(g, current, h, o, &stats);
      const double dist = (next.x - current.x).norm();
      ok = dist >= 0.5 * h && dist <= 1.5 * h &&
           (next.tangent.dot(current.tangent) >= kMinTangentDot || h <= o.h_min || hinted);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::config || e.kind() == ErrorKind::domain) throw;
    }
    if (!ok) {
      fast_streak = 0;
      h *= 0.5;
      if (h < o.h_min) {
        branch.points.back().flag = PointFlag::boundary;
        return branch;
      }
      continue;
    }

    if (o.detect_branch_points) {
      const double tau_next = bordered_determinant(jacobian_of(g, next), next.tangent);
      if (tau_current != 0.0 && (tau_current < 0.0) != (tau_next < 0.0)) {
        try {
          if (auto bp = detect_branch_point(g, current, next, o)) branch.points.push_back(*bp);
        } catch (const Error&) {
          // Refinement failed: flag the bracketing endpoint instead.
          ContinuationPoint marker = current;
          marker.flag = PointFlag::branch_point;
          branch.points.push_back(marker);
        }
      }
      tau_current = tau_next;
    }

    const bool out_of_bounds = next.x(2) < o.lambda_min || next.x(2) > o.lambda_max;
    if (out_of_bounds) next.flag = PointFlag::boundary;
    branch.points.push_back(next);
    if (out_of_bounds) return branch;
    current = next;
    hinted = false;

    if (stats.iterations <= o.fast_iterations) {
      if (++fast_streak >= o.successes_to_grow) {
        h = std::min(2.0 * h, o.h_max);
        fast_streak = 0;
      }
    } else {
      fast_streak = 0;
    }
  }
  branch.points.back().flag = PointFlag::boundary;
  return branch;
}

Branch trace_branch(const ResidualEvaluator& residual, const RootResult& start, double lambda0,
                    int direction, const ContinuationOptions& options) {
  const auto g = ContinuationSystem::from_residual(residual);
  return trace_branch(g, Vec3(start.k.real(), start.k.imag(), lambda0), direction, options);
}

}  // namespace ccres
