#pragma once

// Batched renormalized-Numerov propagation.
//
// Each lane integrates Ψ'' = W(r) Ψ on the nodes r_n = n·h, n = 0..N, with
//
//   W(r_n) = g(r_n)·C + diag(l_i(l_i+1)/r_n²) - k² I,
//
// where C = -2μΛ is the lane's real symmetric coupling matrix and g the
// radial profile shared by all lanes. Instead of Ψ the kernel carries the
// renormalized ratio D_n = F_n F_{n+1}^{-1} of F_n = (I - h²/12 W_n) Ψ_n,
// in the shifted form Y_n = D_n^{-1} - I:
//
//   Y_n = h² P_n W_n + Y_{n-1} (I + Y_{n-1})^{-1},   P_n = (I - h²/12 W_n)^{-1},
//
// so exponentially growing components never overflow and the O(h) content
// of D_n is not rounded away against the identity. The output is
// M - I with M = Ψ_N Ψ_{N-1}^{-1}, which is all that S-matrix matching
// needs.
//
// Lanes that carry an inward seed additionally run the same recursion from
// the far end for a second solution Φ given by its last two nodes, and
// report both sweeps at the interior node m = match_node. The products of
// one-step determinants between m and the ends come back as logarithms, so
// the caller can form the conserved discrete Wronskian
//   Q[Φ, Ψ] = F_Φ,mᵀ F_Ψ,m+1 - F_Φ,m+1ᵀ F_Ψ,m
// without losing the subdominant component of either solution.
//
// Channel counts 1 and 2 go through a single templated body that is
// instantiated for plain doubles (the reference), AVX2 (4 lanes) and
// NEON (2 lanes); the arithmetic sequence is identical in every variant, so
// the SIMD results match the reference bit for bit. Larger channel counts
// use a general LU-based scalar path.

#include <complex>
#include <span>
#include <vector>

namespace ccres::kernels {

using cplx = std::complex<double>;

inline constexpr int kMaxSimdChannels = 2;

/// Lane-independent node data, built once per (grid, potential family).
struct NumerovTables {
  int channels = 0;
  int steps = 0;  ///< N; nodes 0..N
  double h = 0.0;
  std::vector<double> profile;      ///< g(r_n), n = 0..N
  std::vector<double> centrifugal;  ///< l_i(l_i+1)/r_n², node-major, zero at n = 0
  std::vector<double> origin_weight;///< F_0 = E Ψ_1 weights: -1/6 for l = 1, else 0
  int match_node = 0;               ///< interior matching node, 2 <= m <= N-2
};

struct NumerovLane {
  cplx k;
  std::vector<double> coupling;  ///< row-major channels×channels, C = -2μΛ
  /// Empty, or G_N = F_Φ,N-1 F_Φ,N^{-1} - I of the inward solution. Every
  /// lane of a batch must agree on whether this is present.
  std::vector<cplx> inward_seed;
};

struct NumerovLaneResult {
  std::vector<cplx> deviation;  ///< row-major M - I, M = Ψ_N Ψ_{N-1}^{-1}
  bool finite = false;          ///< false if a step met a singular matrix

  // Filled only for lanes with an inward seed (F-variables throughout).
  std::vector<cplx> outward_match;  ///< Y_m = F_Ψ,m+1 F_Ψ,m^{-1} - I
  std::vector<cplx> outward_last;   ///< Y_{N-1}
  std::vector<cplx> inward_match;   ///< G_{m+1} = F_Φ,m F_Φ,m+1^{-1} - I
  cplx log_origin;                  ///< log det F_Ψ,m - log det F_Ψ,1
  cplx log_outward;                 ///< log det F_Ψ,N-1 - log det F_Ψ,m
  cplx log_inward;                  ///< log det F_Φ,m+1 - log det F_Φ,N
};

enum class Backend { automatic, scalar, avx2, neon };

/// Whether the running CPU (and the build) supports the given backend.
bool backend_available(Backend backend);

/// Backend chosen by Backend::automatic on this machine.
Backend preferred_backend();

const char* backend_name(Backend backend);

/// Propagates every lane. Lanes are processed in SIMD groups when the
/// channel count allows it; requesting an unavailable backend falls back to
/// scalar.
void propagate_batch(const NumerovTables& tables, std::span<const NumerovLane> lanes,
                     std::span<NumerovLaneResult> results, Backend backend = Backend::automatic);

namespace detail {
// Fixed-width entry points; lanes/results point at `width` consecutive items.
void propagate_scalar(const NumerovTables& tables, const NumerovLane* lanes,
                      NumerovLaneResult* results, int count);
void propagate_avx2(const NumerovTables& tables, const NumerovLane* lanes,
                    NumerovLaneResult* results);  // 4 lanes
void propagate_neon(const NumerovTables& tables, const NumerovLane* lanes,
                    NumerovLaneResult* results);  // 2 lanes
void propagate_general(const NumerovTables& tables, const NumerovLane& lane,
                       NumerovLaneResult& result);
bool avx2_compiled();
bool neon_compiled();
}  // namespace detail

}  // namespace ccres::kernels
