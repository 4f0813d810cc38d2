#pragma once

#include <complex>
#include <vector>

#include "ccres/scattering.hpp"

namespace ccres {

enum class RootClass { bound, virtual_state, resonance, unphysical_mirror };

const char* to_string(RootClass c) noexcept;

/// |Re k| below this counts as lying on the imaginary axis.
inline constexpr double kAxisTolerance = 1e-6;

RootClass classify(cplx k, double axis_tol = kAxisTolerance);

struct RootResult {
  cplx k;
  double residual_norm = 0.0;  ///< |det F(k)| at return
  int iterations = 0;
  RootClass classification = RootClass::bound;
};

struct NewtonOptions {
  double tol = 1e-10;  ///< bound on |det F| at return
  int max_iter = 60;
};

/// Damped Newton iteration for the zeros of det F(k) at fixed lambda. The
/// derivative is a central difference with real step 1e-6·max(1, |k|); k and
/// k ± d are evaluated as one batch. Steps are taken on the pole-free
/// Wronskian determinant (ResidualValue::jost) when the evaluator provides
/// it, otherwise on det F itself. A step that does not reduce the stepped
/// function is halved up to 8 times. Converged once |det F| <= tol and the
/// last step is below 1e-10·max(1, |k|).
///
/// Throws Error(no_convergence) after max_iter iterations and
/// Error(degenerate) if |d det F/dk| < 1e-14 |det F|.
RootResult newton_complex(const ResidualEvaluator& residual, double lambda, cplx k0,
                          const NewtonOptions& options = {});

RootResult newton_complex(const PotentialModel& model, double lambda, cplx k0,
                          const RadialGrid& grid, double tol = NewtonOptions{}.tol,
                          int max_iter = NewtonOptions{}.max_iter);

/// Bound states on the positive imaginary axis with 0.05 < Im k <= k_max.
///
/// The axis is sampled every 0.02. Brackets come from sign changes of the
/// pole-free Wronskian determinant (ResidualValue::jost) projected onto its
/// constant phase, plus local minima of its magnitude. Each bracket is
/// narrowed by regula falsi and polished with newton_complex. The result is
/// sorted by Im k descending with duplicates (within 1e-6) removed.
std::vector<RootResult> scan_bound_states(const ResidualEvaluator& residual, double lambda,
                                          double k_max, const NewtonOptions& options = {});

std::vector<RootResult> scan_bound_states(const PotentialModel& model, double lambda, double k_max,
                                          const RadialGrid& grid);

}  // namespace ccres
