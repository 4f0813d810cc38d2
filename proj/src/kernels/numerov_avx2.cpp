// Compiled with -mavx2 (no FMA); only entered after a runtime CPU check.
#include "numerov_body.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace ccres::kernels::detail {

namespace {

struct Avx2Vec {
  __m256d v;
  Avx2Vec() = default;
  explicit Avx2Vec(__m256d x) : v(x) {}
  Avx2Vec(double x) : v(_mm256_set1_pd(x)) {}  // NOLINT: broadcast is the intended conversion
};

inline Avx2Vec operator+(Avx2Vec a, Avx2Vec b) { return Avx2Vec(_mm256_add_pd(a.v, b.v)); }
inline Avx2Vec operator-(Avx2Vec a, Avx2Vec b) { return Avx2Vec(_mm256_sub_pd(a.v, b.v)); }
inline Avx2Vec operator*(Avx2Vec a, Avx2Vec b) { return Avx2Vec(_mm256_mul_pd(a.v, b.v)); }
inline Avx2Vec operator/(Avx2Vec a, Avx2Vec b) { return Avx2Vec(_mm256_div_pd(a.v, b.v)); }

struct Avx2IO {
  using vec = Avx2Vec;
  static constexpr int width = 4;
  static Avx2Vec load(const double* p) { return Avx2Vec(_mm256_load_pd(p)); }
  static void store(double* p, Avx2Vec v) { _mm256_store_pd(p, v.v); }
};

}  // namespace

bool avx2_compiled() { return true; }

void propagate_avx2(const NumerovTables& tables, const NumerovLane* lanes,
                    NumerovLaneResult* results) {
  if (tables.channels == 1) {
    body::run_group<Avx2IO, 1>(tables, lanes, results);
  } else {
    body::run_group<Avx2IO, 2>(tables, lanes, results);
  }
}

}  // namespace ccres::kernels::detail

#else

namespace ccres::kernels::detail {
bool avx2_compiled() { return false; }
void propagate_avx2(const NumerovTables& tables, const NumerovLane* lanes,
                    NumerovLaneResult* results) {
  propagate_scalar(tables, lanes, results, 4);
}
}  // namespace ccres::kernels::detail

#endif
