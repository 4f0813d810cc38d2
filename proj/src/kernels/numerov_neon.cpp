#include "numerov_body.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace ccres::kernels::detail {

namespace {

struct NeonVec {
  float64x2_t v;
  NeonVec() = default;
  explicit NeonVec(float64x2_t x) : v(x) {}
  NeonVec(double x) : v(vdupq_n_f64(x)) {}  // NOLINT: broadcast is the intended conversion
};

inline NeonVec operator+(NeonVec a, NeonVec b) { return NeonVec(vaddq_f64(a.v, b.v)); }
inline NeonVec operator-(NeonVec a, NeonVec b) { return NeonVec(vsubq_f64(a.v, b.v)); }
inline NeonVec operator*(NeonVec a, NeonVec b) { return NeonVec(vmulq_f64(a.v, b.v)); }
inline NeonVec operator/(NeonVec a, NeonVec b) { return NeonVec(vdivq_f64(a.v, b.v)); }

struct NeonIO {
  using vec = NeonVec;
  static constexpr int width = 2;
  static NeonVec load(const double* p) { return NeonVec(vld1q_f64(p)); }
  static void store(double* p, NeonVec v) { vst1q_f64(p, v.v); }
};

}  // namespace

bool neon_compiled() { return true; }

void propagate_neon(const NumerovTables& tables, const NumerovLane* lanes,
                    NumerovLaneResult* results) {
  if (tables.channels == 1) {
    body::run_group<NeonIO, 1>(tables, lanes, results);
  } else {
    body::run_group<NeonIO, 2>(tables, lanes, results);
  }
}

}  // namespace ccres::kernels::detail

#else

namespace ccres::kernels::detail {
bool neon_compiled() { return false; }
void propagate_neon(const NumerovTables& tables, const NumerovLane* lanes,
                    NumerovLaneResult* results) {
  propagate_scalar(tables, lanes, results, 2);
}
}  // namespace ccres::kernels::detail

#endif
