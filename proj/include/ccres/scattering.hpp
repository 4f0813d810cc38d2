#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "ccres/radial_solver.hpp"

namespace ccres {

struct SMatrix {
  cplx k;
  double lambda = 0.0;
  Eigen::MatrixXcd s;
};

/// det F = (∏ k^{2l_i+1}) / det(S - I) together with its two factors.
struct ResidualValue {
  cplx det_f;
  cplx det_s_minus_i;
  cplx k_power_product;
  /// det of the Wronskian between the regular solution (Ψ = I at the first
  /// node) and the outgoing solution. Vanishes exactly where det F does but
  /// has no poles, and its phase is constant along the imaginary k axis.
  /// Only set by the interior-match evaluation.
  std::optional<cplx> jost;
};

/// ∏_i k^{2 l_i + 1}.
cplx k_power_product(cplx k, const ChannelSet& channels);

/// Two-point matching with M = psi2·psi1^{-1}:
///   S = (H⁺(r2) - M H⁺(r1))^{-1} (H⁻(r2) - M H⁻(r1)).
/// Throws Error(singular_matrix) when the left factor is numerically singular.
SMatrix extract_smatrix(const AsymptoticSample& sample, cplx k, const ChannelSet& channels,
                        double lambda = 0.0);

/// det F from an explicit S-matrix (LU determinant of S - I).
/// Throws Error(degenerate) if |det(S - I)| < 1e-300.
ResidualValue regularized_det(const SMatrix& s, const ChannelSet& channels);

/// det F straight from the matching data without forming S. With
/// A = H⁺(r2) - M H⁺(r1) and J = Ĵ(r2) - M Ĵ(r1), S - I = -2i A^{-1} J, so
///   det F = (∏ k^{2l+1}) det A / ((-2i)^n det J),
/// which stays finite and accurate at poles of S where A is singular.
ResidualValue matching_residual(const AsymptoticSample& sample, cplx k, const ChannelSet& channels);

/// det F from an interior match (see MatchedSample): the ratio of the
/// conserved discrete Wronskians Q[Φ⁺, Ψ] / Q[Φʲ, Ψ], with Φʲ the Numerov
/// solution equal to Ĵ at the last two nodes, reproduces det A / det J of
/// matching_residual while keeping deep bound-state zeros resolvable.
ResidualValue matched_residual(const MatchedSample& sample, cplx k, const ChannelSet& channels);

/// Matrix Wronskian W[A, B] = A B' - A' B.
Eigen::MatrixXcd wronskian(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& da,
                           const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& db);

/// S from value and r-derivative of a solution at one radius beyond the
/// potential: S = W[ĥ⁻, Ψ] W[ĥ⁺, Ψ]^{-1}, invariant under Ψ → ΨC.
SMatrix smatrix_from_wronskian(const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd& dpsi, double r,
                               cplx k, const ChannelSet& channels, double lambda = 0.0);

/// Propagation + matching for one model/grid; the workhorse behind every
/// root finder and continuation step. Pure and thread-safe.
class ResidualEvaluator {
public:
  ResidualEvaluator(PotentialModel model, RadialGrid grid,
                    kernels::Backend backend = kernels::Backend::automatic);

  ResidualValue operator()(cplx k, double lambda) const;

  /// Evaluates every point; SIMD lanes are filled across points.
  std::vector<ResidualValue> evaluate(std::span<const WavePoint> points) const;

  SMatrix smatrix(cplx k, double lambda) const;

  const RadialSolver& solver() const { return solver_; }
  const PotentialModel& model() const { return solver_.model(); }
  const RadialGrid& grid() const { return solver_.grid(); }

private:
  RadialSolver solver_;
};

/// propagate → match → det F for a single point.
ResidualValue residual(const PotentialModel& model, cplx k, double lambda, const RadialGrid& grid);

}  // namespace ccres
