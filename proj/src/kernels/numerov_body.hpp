#pragma once

// Lane-generic renormalized Numerov body. V is a lane vector type exposing
// +, -, *, / and construction from a broadcast double; LaneIO moves data
// between NumerovLane structs and V. Do not compile this with FMA
// contraction enabled: the scalar instantiation is the bitwise reference.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "ccres/kernels/numerov_kernel.hpp"

namespace ccres::kernels::body {

template <class V>
struct Cx {
  V re;
  V im;
};

template <class V>
inline Cx<V> add(const Cx<V>& a, const Cx<V>& b) {
  return {a.re + b.re, a.im + b.im};
}

template <class V>
inline Cx<V> sub(const Cx<V>& a, const Cx<V>& b) {
  return {a.re - b.re, a.im - b.im};
}

template <class V>
inline Cx<V> mul(const Cx<V>& a, const Cx<V>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

template <class V>
inline Cx<V> scale(const V& s, const Cx<V>& a) {
  return {s * a.re, s * a.im};
}

template <class V>
inline Cx<V> reciprocal(const Cx<V>& a) {
  const V inv_norm = V(1.0) / (a.re * a.re + a.im * a.im);
  return {a.re * inv_norm, V(0.0) - a.im * inv_norm};
}

template <class V, int N>
using CMat = std::array<Cx<V>, N * N>;

template <class V, int N>
inline CMat<V, N> matmul(const CMat<V, N>& a, const CMat<V, N>& b) {
  CMat<V, N> c;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      Cx<V> acc = mul(a[i * N], b[j]);
      for (int m = 1; m < N; ++m) acc = add(acc, mul(a[i * N + m], b[m * N + j]));
      c[i * N + j] = acc;
    }
  }
  return c;
}

template <class V, int N>
inline CMat<V, N> inverse(const CMat<V, N>& a) {
  static_assert(N == 1 || N == 2, "closed-form inverse only for 1 and 2 channels");
  if constexpr (N == 1) {
    return {reciprocal(a[0])};
  } else {
    const Cx<V> det = sub(mul(a[0], a[3]), mul(a[1], a[2]));
    const Cx<V> r = reciprocal(det);
    const Cx<V> zero{V(0.0), V(0.0)};
    return {mul(a[3], r), mul(sub(zero, a[1]), r), mul(sub(zero, a[2]), r), mul(a[0], r)};
  }
}

/// (I - h²/12 W_n) at node n for the lane group.
template <class V, int N>
inline CMat<V, N> numerov_factor(const NumerovTables& t, int n, const Cx<V>& diag_offset,
                                 const std::array<V, N * N>& coupling, const V& a) {
  const V g(t.profile[n]);
  CMat<V, N> m;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const V entry = a * (g * coupling[i * N + j]);
      if (i == j) {
        const V cent(t.centrifugal[static_cast<std::size_t>(n) * N + i]);
        m[i * N + j] = {diag_offset.re - (entry + a * cent), diag_offset.im};
      } else {
        m[i * N + j] = {V(0.0) - entry, V(0.0)};
      }
    }
  }
  return m;
}

/// W_n = g_n C + diag(l(l+1)/r_n²) - k² I.
template <class V, int N>
inline CMat<V, N> coupling_matrix(const NumerovTables& t, int n, const Cx<V>& k2,
                                  const std::array<V, N * N>& coupling) {
  const V g(t.profile[n]);
  CMat<V, N> w;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const V entry = g * coupling[i * N + j];
      if (i == j) {
        const V cent(t.centrifugal[static_cast<std::size_t>(n) * N + i]);
        w[i * N + j] = {(entry + cent) - k2.re, V(0.0) - k2.im};
      } else {
        w[i * N + j] = {entry, V(0.0)};
      }
    }
  }
  return w;
}

/// det(I + Y).
template <class V, int N>
inline Cx<V> det_shifted(const CMat<V, N>& y) {
  if constexpr (N == 1) {
    return {V(1.0) + y[0].re, y[0].im};
  } else {
    const Cx<V> a{V(1.0) + y[0].re, y[0].im};
    const Cx<V> d{V(1.0) + y[3].re, y[3].im};
    return sub(mul(a, d), mul(y[1], y[2]));
  }
}

/// Y (I + Y)^{-1}.
template <class V, int N>
inline CMat<V, N> carry(const CMat<V, N>& y) {
  CMat<V, N> shifted = y;
  for (int i = 0; i < N; ++i) shifted[i * N + i].re = shifted[i * N + i].re + V(1.0);
  return matmul<V, N>(y, inverse<V, N>(shifted));
}

/// Running complex product kept per lane as a logarithm, folded every few
/// factors so the product itself never leaves the representable range.
template <class IO>
struct LogProduct {
  using V = typename IO::vec;
  static constexpr int kFoldEvery = 8;

  Cx<V> prod{V(1.0), V(0.0)};
  int pending = 0;
  cplx sum[IO::width] = {};

  void multiply(const Cx<V>& f) {
    prod = mul(prod, f);
    if (++pending == kFoldEvery) fold();
  }

  void fold() {
    alignas(64) double re[IO::width];
    alignas(64) double im[IO::width];
    IO::store(re, prod.re);
    IO::store(im, prod.im);
    for (int w = 0; w < IO::width; ++w) sum[w] += std::log(cplx{re[w], im[w]});
    prod = {V(1.0), V(0.0)};
    pending = 0;
  }
};

template <class IO, int N>
struct GroupOutput {
  using V = typename IO::vec;
  CMat<V, N> deviation;      // M - I
  CMat<V, N> outward_match;  // Y_m
  CMat<V, N> outward_last;   // Y_{N-1}
  CMat<V, N> inward_match;   // G_{m+1}
  LogProduct<IO> log_origin;
  LogProduct<IO> log_outward;
  LogProduct<IO> log_inward;
};

/// Runs the recursion for one lane group.
///
/// D_n is close to I, so the outward sweep carries Y_n = D_n^{-1} - I:
///   Y_n = h² P_n W_n + Y_{n-1} (I + Y_{n-1})^{-1},   P_n = (I - h²/12 W_n)^{-1},
/// which keeps relative precision in the O(h) log-derivative information
/// rather than losing it against the identity at every step. I + Y_n is the
/// one-step ratio F_{n+1} F_n^{-1}.
///
/// The optional inward sweep runs the same recursion from the far end for
/// G_n = Φ_{n-1} Φ_n^{-1} - I (F-variables), seeded with G_N.
template <class IO, int N>
void propagate_group(const NumerovTables& t, const Cx<typename IO::vec>& k,
                     const std::array<typename IO::vec, N * N>& coupling,
                     const CMat<typename IO::vec, N>* inward_seed, GroupOutput<IO, N>& out) {
  using V = typename IO::vec;
  const V a(t.h * t.h / 12.0);
  const V h2(t.h * t.h);
  const Cx<V> k2 = mul(k, k);
  // 1 + (h²/12) k²
  const Cx<V> diag_offset{V(1.0) + a * k2.re, a * k2.im};
  const int match = t.match_node;

  auto step_term = [&](int n, CMat<V, N>& factor) {
    factor = numerov_factor<V, N>(t, n, diag_offset, coupling, a);
    CMat<V, N> step = matmul<V, N>(inverse<V, N>(factor), coupling_matrix<V, N>(t, n, k2, coupling));
    for (auto& e : step) e = scale(h2, e);
    return step;
  };

  CMat<V, N> y;
  CMat<V, N> factor;
  for (int n = 1; n < t.steps; ++n) {
    const CMat<V, N> step = step_term(n, factor);
    if (n == 1) {
      // Y_1 = U_1 - D_0 - I with D_0 = F_0 F_1^{-1}. Ψ_0 = 0, but
      // F_0 = -(h²/12)(WΨ)_0 survives in l = 1 rows.
      const CMat<V, N> p = inverse<V, N>(factor);
      for (int i = 0; i < N; ++i) {
        const V w(t.origin_weight[i]);
        for (int j = 0; j < N; ++j) {
          Cx<V> e = sub(step[i * N + j], scale(w, p[i * N + j]));
          if (i == j) e.re = e.re + V(1.0);
          y[i * N + j] = e;
        }
      }
    } else {
      const CMat<V, N> c = carry<V, N>(y);
      for (int i = 0; i < N * N; ++i) y[i] = add(step[i], c[i]);
    }
    if (inward_seed != nullptr) {
      if (n == match) out.outward_match = y;
      if (n < match) out.log_origin.multiply(det_shifted<V, N>(y));
      if (n >= match && n + 1 < t.steps) out.log_outward.multiply(det_shifted<V, N>(y));
    }
  }
  out.outward_last = y;

  // M - I = P_N [Y_{N-1} (I - h²/12 W_{N-1}) + h²/12 (W_N - W_{N-1})];
  // factor still holds node N-1.
  const int last = t.steps;
  CMat<V, N> inner = matmul<V, N>(y, factor);
  const V dg = V(t.profile[last]) - V(t.profile[last - 1]);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      V dw = dg * coupling[i * N + j];
      if (i == j) {
        const std::size_t idx = static_cast<std::size_t>(last) * N + i;
        dw = dw + (V(t.centrifugal[idx]) - V(t.centrifugal[idx - N]));
      }
      inner[i * N + j].re = inner[i * N + j].re + a * dw;
    }
  }
  out.deviation =
      matmul<V, N>(inverse<V, N>(numerov_factor<V, N>(t, last, diag_offset, coupling, a)), inner);

  if (inward_seed == nullptr) return;
  CMat<V, N> g = *inward_seed;
  out.log_inward.multiply(det_shifted<V, N>(g));
  for (int n = last - 1; n > match; --n) {
    const CMat<V, N> step = step_term(n, factor);
    const CMat<V, N> c = carry<V, N>(g);
    for (int i = 0; i < N * N; ++i) g[i] = add(step[i], c[i]);
    if (n > match + 1) out.log_inward.multiply(det_shifted<V, N>(g));
  }
  out.inward_match = g;
  out.log_origin.fold();
  out.log_outward.fold();
  out.log_inward.fold();
}

/// Generic driver: IO::width lanes per group.
template <class IO, int N>
void run_group(const NumerovTables& t, const NumerovLane* lanes, NumerovLaneResult* results) {
  using V = typename IO::vec;
  constexpr int width = IO::width;
  alignas(64) double buf_re[width];
  alignas(64) double buf_im[width];
  for (int w = 0; w < width; ++w) {
    buf_re[w] = lanes[w].k.real();
    buf_im[w] = lanes[w].k.imag();
  }
  const Cx<V> k{IO::load(buf_re), IO::load(buf_im)};
  std::array<V, N * N> coupling;
  for (int i = 0; i < N * N; ++i) {
    for (int w = 0; w < width; ++w) buf_re[w] = lanes[w].coupling[i];
    coupling[i] = IO::load(buf_re);
  }
  const bool inward = !lanes[0].inward_seed.empty();
  CMat<V, N> seed;
  if (inward) {
    for (int i = 0; i < N * N; ++i) {
      for (int w = 0; w < width; ++w) {
        buf_re[w] = lanes[w].inward_seed[i].real();
        buf_im[w] = lanes[w].inward_seed[i].imag();
      }
      seed[i] = {IO::load(buf_re), IO::load(buf_im)};
    }
  }

  GroupOutput<IO, N> out;
  propagate_group<IO, N>(t, k, coupling, inward ? &seed : nullptr, out);

  for (int w = 0; w < width; ++w) {
    results[w] = NumerovLaneResult{};
    results[w].finite = true;
  }
  auto export_matrix = [&](const CMat<V, N>& m, std::vector<cplx> NumerovLaneResult::*field) {
    for (int w = 0; w < width; ++w) (results[w].*field).resize(N * N);
    for (int i = 0; i < N * N; ++i) {
      IO::store(buf_re, m[i].re);
      IO::store(buf_im, m[i].im);
      for (int w = 0; w < width; ++w) {
        (results[w].*field)[i] = cplx{buf_re[w], buf_im[w]};
        if (!std::isfinite(buf_re[w]) || !std::isfinite(buf_im[w])) results[w].finite = false;
      }
    }
  };
  export_matrix(out.deviation, &NumerovLaneResult::deviation);
  if (!inward) return;
  export_matrix(out.outward_match, &NumerovLaneResult::outward_match);
  export_matrix(out.outward_last, &NumerovLaneResult::outward_last);
  export_matrix(out.inward_match, &NumerovLaneResult::inward_match);
  for (int w = 0; w < width; ++w) {
    results[w].log_origin = out.log_origin.sum[w];
    results[w].log_outward = out.log_outward.sum[w];
    results[w].log_inward = out.log_inward.sum[w];
    if (!std::isfinite(std::abs(results[w].log_origin)) ||
        !std::isfinite(std::abs(results[w].log_outward)) ||
        !std::isfinite(std::abs(results[w].log_inward))) {
      results[w].finite = false;
    }
  }
}

}  // namespace ccres::kernels::body
