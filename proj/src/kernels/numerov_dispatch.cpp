#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ccres/kernels/numerov_kernel.hpp"

namespace ccres::kernels {

namespace detail {

void propagate_general(const NumerovTables& t, const NumerovLane& lane, NumerovLaneResult& result) {
  const int n = t.channels;
  using Mat = Eigen::MatrixXcd;
  const double a = t.h * t.h / 12.0;
  const cplx offset = 1.0 + a * lane.k * lane.k;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      coupling(lane.coupling.data(), n, n);
  const bool inward = !lane.inward_seed.empty();
  const int match = t.match_node;

  auto factor_at = [&](int node) {
    Mat m = (-a * t.profile[node] * coupling).cast<cplx>();
    for (int i = 0; i < n; ++i) {
      m(i, i) += offset - a * t.centrifugal[static_cast<std::size_t>(node) * n + i];
    }
    return m;
  };
  auto w_at = [&](int node) {
    Mat w = (t.profile[node] * coupling).cast<cplx>();
    for (int i = 0; i < n; ++i) {
      w(i, i) += t.centrifugal[static_cast<std::size_t>(node) * n + i] - lane.k * lane.k;
    }
    return w;
  };
  const Mat id = Mat::Identity(n, n);
  auto carry = [&](const Mat& y) -> Mat { return y * (id + y).partialPivLu().inverse(); };
  auto log_det_shifted = [&](const Mat& y) { return std::log((id + y).partialPivLu().determinant()); };
  auto to_vector = [&](const Mat& m) {
    std::vector<cplx> v(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = m(i, j);
    }
    return v;
  };

  result = NumerovLaneResult{};
  Mat y(n, n);
  Mat factor(n, n);
  for (int node = 1; node < t.steps; ++node) {
    factor = factor_at(node);
    const Mat p = factor.partialPivLu().inverse();
    const Mat step = t.h * t.h * (p * w_at(node));
    if (node == 1) {
      y = step + id -
          Eigen::Map<const Eigen::VectorXd>(t.origin_weight.data(), n).cast<cplx>().asDiagonal() * p;
    } else {
      y = step + carry(y);
    }
    if (inward) {
      if (node == match) result.outward_match = to_vector(y);
      if (node < match) result.log_origin += log_det_shifted(y);
      if (node >= match && node + 1 < t.steps) result.log_outward += log_det_shifted(y);
    }
  }
  Mat inner = y * factor;
  inner += (a * (t.profile[t.steps] - t.profile[t.steps - 1]) * coupling).cast<cplx>();
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = static_cast<std::size_t>(t.steps) * n + i;
    inner(i, i) += a * (t.centrifugal[idx] - t.centrifugal[idx - n]);
  }
  const Mat m = factor_at(t.steps).partialPivLu().inverse() * inner;
  result.deviation = to_vector(m);
  result.finite = m.allFinite();
  if (!inward) return;

  result.outward_last = to_vector(y);
  Mat g = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      lane.inward_seed.data(), n, n);
  result.log_inward = log_det_shifted(g);
  for (int node = t.steps - 1; node > match; --node) {
    const Mat step = t.h * t.h * (factor_at(node).partialPivLu().inverse() * w_at(node));
    g = step + carry(g);
    if (node > match + 1) result.log_inward += log_det_shifted(g);
  }
  result.inward_match = to_vector(g);
  result.finite = result.finite && y.allFinite() && g.allFinite() &&
                  std::isfinite(std::abs(result.log_origin)) &&
                  std::isfinite(std::abs(result.log_outward)) &&
                  std::isfinite(std::abs(result.log_inward));
}

}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::automatic:
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return detail::avx2_compiled() && cpu_has_avx2();
    case Backend::neon:
      return detail::neon_compiled();
  }
  return false;
}

Backend preferred_backend() {
  static const Backend chosen = [] {
    if (backend_available(Backend::avx2)) return Backend::avx2;
    if (backend_available(Backend::neon)) return Backend::neon;
    return Backend::scalar;
  }();
  return chosen;
}

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::automatic: return "automatic";
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

void propagate_batch(const NumerovTables& tables, std::span<const NumerovLane> lanes,
                     std::span<NumerovLaneResult> results, Backend backend) {
  if (backend == Backend::automatic) backend = preferred_backend();
  if (!backend_available(backend) || tables.channels > kMaxSimdChannels) backend = Backend::scalar;

  const int count = static_cast<int>(lanes.size());
  int width = 1;
  if (backend == Backend::avx2) width = 4;
  if (backend == Backend::neon) width = 2;

  int done = 0;
  if (width > 1) {
    for (; done + width <= count; done += width) {
      if (backend == Backend::avx2) {
        detail::propagate_avx2(tables, lanes.data() + done, results.data() + done);
      } else {
        detail::propagate_neon(tables, lanes.data() + done, results.data() + done);
      }
    }
    const int rest = count - done;
    if (rest > 1) {
      // Pad the tail group with copies of its first lane.
      std::vector<NumerovLane> padded(lanes.begin() + done, lanes.end());
      padded.resize(width, lanes[done]);
      std::vector<NumerovLaneResult> out(width);
      if (backend == Backend::avx2) {
        detail::propagate_avx2(tables, padded.data(), out.data());
      } else {
        detail::propagate_neon(tables, padded.data(), out.data());
      }
      std::move(out.begin(), out.begin() + rest, results.begin() + done);
      done = count;
    }
  }
  detail::propagate_scalar(tables, lanes.data() + done, results.data() + done, count - done);
}

}  // namespace ccres::kernels
