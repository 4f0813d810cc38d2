#include "ccres/rootfinding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "ccres/errors.hpp"
#include "ccres/numerics.hpp"

namespace ccres {

const char* to_string(RootClass c) noexcept {
  switch (c) {
    case RootClass::bound: return "bound";
    case RootClass::virtual_state: return "virtual";
    case RootClass::resonance: return "resonance";
    case RootClass::unphysical_mirror: return "unphysical_mirror";
  }
  return "unknown";
}

RootClass classify(cplx k, double axis_tol) {
  if (std::abs(k.real()) < axis_tol) {
    return k.imag() > 0.0 ? RootClass::bound : RootClass::virtual_state;
  }
  return k.real() < 0.0 ? RootClass::unphysical_mirror : RootClass::resonance;
}

namespace {

constexpr int kMaxHalvings = 8;
constexpr double kDerivativeStep = 1e-6;
constexpr double kStepTolerance = 1e-10;
constexpr double kDegenerateDerivative = 1e-14;

struct Sample {
  cplx det_f;
  cplx step_function;  // what the Newton step is taken on
};

// Steps use the pole-free Wronskian determinant when it is available: it has
// the zeros of det F but keeps its accuracy where det F is many orders of
// magnitude below rounding (deep states on a long grid).
bool use_jost(const ResidualValue& v) { return v.jost && std::isfinite(std::abs(*v.jost)); }

std::optional<Sample> try_sample(const ResidualEvaluator& residual, cplx k, double lambda, bool jost) {
  try {
    const ResidualValue v = residual(k, lambda);
    if (jost && !use_jost(v)) return std::nullopt;
    return Sample{v.det_f, jost ? *v.jost : v.det_f};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::degenerate || e.kind() == ErrorKind::singular_matrix) return std::nullopt;
    throw;
  }
}

}  // namespace

RootResult newton_complex(const ResidualEvaluator& residual, double lambda, cplx k0,
                          const NewtonOptions& options) {
  if (k0 == cplx{0.0, 0.0}) throw Error(ErrorKind::domain, "newton_complex: k0 = 0");
  if (!(options.tol > 0.0)) throw Error(ErrorKind::config, "newton_complex: tol must be positive");

  cplx k = k0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const double d = kDerivativeStep * std::max(1.0, std::abs(k));
    const std::array<WavePoint, 3> pts{{{k, lambda}, {k + d, lambda}, {k - d, lambda}}};
    const auto vals = residual.evaluate(pts);
    const bool jost = use_jost(vals[0]) && use_jost(vals[1]) && use_jost(vals[2]);
    auto value = [&](const ResidualValue& v) { return jost ? *v.jost : v.det_f; };
    const cplx f = value(vals[0]);
    const cplx df = (value(vals[1]) - value(vals[2])) / (2.0 * d);
    if (!(std::abs(df) >= kDegenerateDerivative * std::abs(f))) {
      throw Error(ErrorKind::degenerate, "newton_complex: |d det F/dk| vanishes (multiple zero or pole)");
    }

    cplx dk = -f / df;
    cplx k_new = k + dk;
    std::optional<Sample> next = try_sample(residual, k_new, lambda, jost);
    for (int halving = 0; halving < kMaxHalvings; ++halving) {
      if (next && std::abs(next->step_function) < std::abs(f)) break;
      dk *= 0.5;
      k_new = k + dk;
      next = try_sample(residual, k_new, lambda, jost);
    }
    if (!next) {
      throw Error(ErrorKind::no_convergence, "newton_complex: every damped step hit a singular point");
    }
    k = k_new;
    if (std::abs(next->det_f) <= options.tol && std::abs(dk) <= kStepTolerance * std::max(1.0, std::abs(k))) {
      return RootResult{k, std::abs(next->det_f), it, classify(k)};
    }
  }
  throw Error(ErrorKind::no_convergence,
              "newton_complex: no convergence after " + std::to_string(options.max_iter) +
                  " iterations (last k = " + std::to_string(k.real()) + " + " +
                  std::to_string(k.imag()) + "i)");
}

RootResult newton_complex(const PotentialModel& model, double lambda, cplx k0,
                          const RadialGrid& grid, double tol, int max_iter) {
  return newton_complex(ResidualEvaluator(model, grid), lambda, k0, NewtonOptions{tol, max_iter});
}

namespace {

constexpr double kScanStart = 0.05;
constexpr double kScanStep = 0.02;
constexpr double kDuplicateTolerance = 1e-6;

std::vector<std::optional<cplx>> axis_samples(const ResidualEvaluator& residual, double lambda,
                                              const std::vector<double>& ys) {
  std::vector<WavePoint> pts;
  pts.reserve(ys.size());
  for (double y : ys) pts.push_back({cplx{0.0, y}, lambda});
  std::vector<std::optional<cplx>> out(ys.size());
  auto take = [](const ResidualValue& v) -> std::optional<cplx> {
    if (v.jost && std::isfinite(std::abs(*v.jost))) return v.jost;
    return std::nullopt;
  };
  try {
    const auto vals = residual.evaluate(pts);
    for (std::size_t i = 0; i < vals.size(); ++i) out[i] = take(vals[i]);
  } catch (const Error&) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      try {
        out[i] = take(residual(pts[i].k, lambda));
      } catch (const Error&) {
      }
    }
  }
  return out;
}

}  // namespace

std::vector<RootResult> scan_bound_states(const ResidualEvaluator& residual, double lambda,
                                          double k_max, const NewtonOptions& options) {
  if (!(k_max > 0.0)) throw Error(ErrorKind::config, "scan_bound_states: k_max must be positive");
  std::vector<double> ys;
  for (int i = 0;; ++i) {
    const double y = kScanStart + kScanStep * i;
    if (y > k_max + 1e-12) break;
    ys.push_back(y);
  }
  const auto samples = axis_samples(residual, lambda, ys);

  // The Wronskian determinant has a fixed phase on the imaginary axis;
  // rotate it onto the real line.
  cplx phase{1.0, 0.0};
  for (const auto& s : samples) {
    if (s && std::abs(*s) > 0.0) {
      phase = std::conj(*s / std::abs(*s));
      break;
    }
  }
  auto projected = [&](double y) -> std::optional<double> {
    try {
      const auto v = residual(cplx{0.0, y}, lambda);
      if (v.jost) return (*v.jost * phase).real();
    } catch (const Error&) {
    }
    return std::nullopt;
  };

  std::vector<double> starts;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (!samples[i] || !samples[i + 1]) continue;
    const double a = (*samples[i] * phase).real();
    const double b = (*samples[i + 1] * phase).real();
    if (a == 0.0) {
      starts.push_back(ys[i]);
    } else if ((a < 0.0) != (b < 0.0)) {
      const auto root = illinois(
          [&](double y) {
            const auto p = projected(y);
            if (!p) throw Error(ErrorKind::singular_matrix, "scan: evaluation failed inside bracket");
            return *p;
          },
          ys[i], ys[i + 1], a, b, 1e-13, 200);
      starts.push_back(root);
    }
  }
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    if (!samples[i - 1] || !samples[i] || !samples[i + 1]) continue;
    const double m = std::abs(*samples[i]);
    if (m < std::abs(*samples[i - 1]) && m < std::abs(*samples[i + 1])) starts.push_back(ys[i]);
  }

  std::vector<RootResult> roots;
  for (double y : starts) {
    RootResult r;
    try {
      r = newton_complex(residual, lambda, cplx{0.0, y}, options);
    } catch (const Error&) {
      continue;
    }
    if (r.classification != RootClass::bound || r.k.imag() <= kScanStart ||
        r.k.imag() > k_max + kScanStep) {
      continue;
    }
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const RootResult& o) {
      return std::abs(o.k - r.k) < kDuplicateTolerance;
    });
    if (!duplicate) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end(),
            [](const RootResult& a, const RootResult& b) { return a.k.imag() > b.k.imag(); });
  return roots;
}

std::vector<RootResult> scan_bound_states(const PotentialModel& model, double lambda, double k_max,
                                          const RadialGrid& grid) {
  return scan_bound_states(ResidualEvaluator(model, grid), lambda, k_max);
}

}  // namespace ccres
