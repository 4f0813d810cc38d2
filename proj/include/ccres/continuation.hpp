#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "ccres/rootfinding.hpp"
#include "ccres/scattering.hpp"

namespace ccres {

/// Continuation space: x = (Re k, Im k, λ).
using Vec3 = Eigen::Vector3d;
using Jacobian = Eigen::Matrix<double, 2, 3>;

enum class PointFlag { regular, start, branch_point, boundary };

const char* to_string(PointFlag flag) noexcept;

struct ContinuationPoint {
  Vec3 x = Vec3::Zero();
  Vec3 tangent = Vec3::Zero();
  double residual_norm = 0.0;
  PointFlag flag = PointFlag::regular;
  /// Jacobian of G at x when it has been evaluated (NaN otherwise).
  Jacobian jacobian = Jacobian::Constant(std::numeric_limits<double>::quiet_NaN());
};

struct BranchParent {
  int branch_id = 0;
  int point_index = 0;
};

struct Branch {
  std::vector<ContinuationPoint> points;
  int branch_id = 0;
  std::optional<BranchParent> parent;
};

/// Real map G: R³ → R², G(x) = (Re det F, Im det F) for the model's
/// residual, or any test function with the same shape. Batched so that the
/// six Jacobian evaluations can share SIMD lanes.
class ContinuationSystem {
public:
  using BatchMap = std::function<std::vector<Eigen::Vector2d>(const std::vector<Vec3>&)>;

  explicit ContinuationSystem(BatchMap map) : map_(std::move(map)) {}

  /// det F of the evaluator; k = 0 requests are nudged to |k| = 1e-9.
  static ContinuationSystem from_residual(ResidualEvaluator residual);

  Eigen::Vector2d operator()(const Vec3& x) const { return map_({x}).front(); }
  std::vector<Eigen::Vector2d> evaluate(const std::vector<Vec3>& xs) const { return map_(xs); }

private:
  BatchMap map_;
};

struct ContinuationOptions {
  double h_min = 1e-4;
  double h_max = 1e-2;
  double h_initial = 1e-3;
  double tol = 1e-6;           ///< corrector bound on ‖G‖
  double step_tol = 1e-9;      ///< corrector bound on the last update
  int max_corrector_iter = 8;
  int fast_iterations = 3;     ///< corrector iterations counted as "fast"
  int successes_to_grow = 3;
  int max_points = 20000;
  double lambda_min = 0.0;
  double lambda_max = 1e300;
  bool detect_branch_points = true;
};

/// Central differences with per-coordinate step 1e-6·max(1, |x_i|).
Jacobian jacobian(const ContinuationSystem& g, const Vec3& x);

/// Unit null vector of a rank-2 Jacobian (cross product of its rows),
/// oriented to have non-negative dot product with `orient`.
Vec3 null_tangent(const Jacobian& j, const Vec3& orient);

/// τ(x) = det [J; tᵀ]; changes sign across a simple branch point.
double bordered_determinant(const Jacobian& j, const Vec3& t);

struct CorrectorStats {
  int iterations = 0;
  bool fresh_jacobian = false;
};

/// Predictor x + h·t followed by a Newton corrector on [G; tᵀ(x - x_p)]
/// (chord iteration with the Jacobian at `current`, then a fresh Jacobian
/// if that stalls). Throws Error(no_convergence) if the corrector fails and
/// Error(step_underflow) if h < h_min.
ContinuationPoint predict_correct(const ContinuationSystem& g, const ContinuationPoint& current,
                                  double h, const ContinuationOptions& options,
                                  CorrectorStats* stats = nullptr);

/// Converges an arbitrary guess onto G = 0 inside the plane orthogonal to
/// `normal` through the guess.
ContinuationPoint correct_point(const ContinuationSystem& g, const Vec3& guess, const Vec3& normal,
                                const ContinuationOptions& options);

/// Refines a τ sign change between two consecutive points by secant steps
/// along the branch (at most 20), stopping when the bracket is shorter than
/// 1e-4 in arclength. Returns nullopt if τ does not change sign.
std::optional<ContinuationPoint> detect_branch_point(const ContinuationSystem& g,
                                                     const ContinuationPoint& prev,
                                                     const ContinuationPoint& next,
                                                     const ContinuationOptions& options);

/// Null directions at a branch point that leave the incoming branch: the
/// singular vector of J in the 2-dimensional null space orthogonal to the
/// incoming tangent, in both orientations. Throws Error(degenerate) if the
/// second singular value is not below 1e-3 of the largest.
std::vector<Vec3> switch_branch(const ContinuationSystem& g, const ContinuationPoint& bp);

/// Traces from a converged point. `direction` selects the sign of the
/// initial dλ, or, when `initial_tangent` is given, that tangent is used
/// as the first orientation instead. Stops at the λ bounds, the point
/// budget, or step underflow; the last point is flagged boundary.
Branch trace_branch(const ContinuationSystem& g, const Vec3& start, int direction,
                    const ContinuationOptions& options,
                    const std::optional<Vec3>& initial_tangent = std::nullopt);

/// Convenience overload: residual of the model at `start.k`, `lambda0`.
Branch trace_branch(const ResidualEvaluator& residual, const RootResult& start, double lambda0,
                    int direction, const ContinuationOptions& options);

}  // namespace ccres
