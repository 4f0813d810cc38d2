#pragma once

#include <Eigen/Core>
#include <complex>
#include <span>
#include <vector>

#include "ccres/kernels/numerov_kernel.hpp"
#include "ccres/potentials.hpp"

namespace ccres {

using cplx = std::complex<double>;

/// Equidistant radial mesh r_n = n·h, n = 0..n_points, h = r_max / n_points.
struct RadialGrid {
  double r_max = 4.6;
  int n_points = 4096;

  double step() const { return r_max / n_points; }
  double node(int n) const { return n * step(); }

  /// Throws Error(config) for n_points < 16 or non-positive r_max.
  void validate() const;
};

/// Potential magnitude below which the tail beyond r_max is neglected when
/// checking that a grid covers the potential.
inline constexpr double kGridCoverageTolerance = 1e-7;

/// Solution samples at the two outermost nodes. Columns are independent
/// regular solutions, rows are channels. Samples are normalized so that
/// psi1 = I; any right multiplier Ψ → ΨC describes the same solution space.
struct AsymptoticSample {
  double r1 = 0.0;
  double r2 = 0.0;
  Eigen::MatrixXcd psi1;
  Eigen::MatrixXcd psi2;
};

/// Outward regular solution Ψ and inward outgoing solution Φ (Φ = Ĥ⁺ at
/// the last two nodes) meeting at an interior node m. Matrices are in the
/// Numerov variables F_n = (I - h²/12 W_n) X_n:
///   outward_match = F_Ψ,m+1 F_Ψ,m^{-1} - I,  outward_last = F_Ψ,N F_Ψ,N-1^{-1} - I,
///   inward_match  = F_Φ,m F_Φ,m+1^{-1} - I,
///   log_origin    = log det F_Ψ,m - log det F_Ψ,1,
///   log_outward   = log det F_Ψ,N-1 - log det F_Ψ,m,
///   log_inward    = log det F_Φ,m+1 - log det F_Φ,N.
/// factor_first, factor_last1, factor_last2 are I - h²/12 W at nodes 1,
/// N-1 and N.
struct MatchedSample {
  AsymptoticSample asymptotic;
  int match_node = 0;
  Eigen::MatrixXcd outward_match;
  Eigen::MatrixXcd outward_last;
  Eigen::MatrixXcd inward_match;
  cplx log_origin;
  cplx log_outward;
  cplx log_inward;
  Eigen::MatrixXcd factor_first;
  Eigen::MatrixXcd factor_last1;
  Eigen::MatrixXcd factor_last2;
};

/// One (k, λ) evaluation request.
struct WavePoint {
  cplx k;
  double lambda = 0.0;
};

/// Renormalized Numerov propagator bound to one potential model and grid.
/// The node tables are built once; each propagate() call is independent and
/// the object is safe to share between threads.
class RadialSolver {
public:
  RadialSolver(PotentialModel model, RadialGrid grid,
               kernels::Backend backend = kernels::Backend::automatic);

  /// Throws Error(domain) for k = 0 or a grid not covering the potential at
  /// this lambda, Error(overflow) if exp(|Im k| r_max) is not representable,
  /// Error(singular_matrix) if a renormalization step is singular.
  AsymptoticSample propagate(cplx k, double lambda) const;

  /// Same as propagate() for many points; lanes share SIMD groups.
  std::vector<AsymptoticSample> propagate(std::span<const WavePoint> points) const;

  /// propagate() plus the interior match against the outgoing solution;
  /// this is what stable det F evaluation needs near deep bound states.
  std::vector<MatchedSample> propagate_matched(std::span<const WavePoint> points) const;

  /// I - h²/12 W(r_node) for one point.
  Eigen::MatrixXcd numerov_factor(int node, const WavePoint& p) const;

  const PotentialModel& model() const { return model_; }
  const RadialGrid& grid() const { return grid_; }
  const kernels::NumerovTables& tables() const { return tables_; }
  kernels::Backend backend() const { return backend_; }

private:
  kernels::NumerovLane make_lane(const WavePoint& p) const;
  std::vector<kernels::NumerovLaneResult> run(std::span<const WavePoint> points, bool matched) const;
  AsymptoticSample to_sample(const kernels::NumerovLaneResult& r) const;
  void check_point(const WavePoint& p) const;

  PotentialModel model_;
  RadialGrid grid_;
  kernels::Backend backend_;
  kernels::NumerovTables tables_;
};

/// Convenience wrapper building a one-shot solver.
AsymptoticSample propagate(const PotentialModel& model, cplx k, double lambda,
                           const RadialGrid& grid);

}  // namespace ccres
