#include "numerov_body.hpp"

namespace ccres::kernels::detail {

namespace {

struct ScalarIO {
  using vec = double;
  static constexpr int width = 1;
  static double load(const double* p) { return p[0]; }
  static void store(double* p, double v) { p[0] = v; }
};

}  // namespace

void propagate_scalar(const NumerovTables& tables, const NumerovLane* lanes,
                      NumerovLaneResult* results, int count) {
  for (int i = 0; i < count; ++i) {
    if (tables.channels == 1) {
      body::run_group<ScalarIO, 1>(tables, lanes + i, results + i);
    } else if (tables.channels == 2) {
      body::run_group<ScalarIO, 2>(tables, lanes + i, results + i);
    } else {
      propagate_general(tables, lanes[i], results[i]);
    }
  }
}

}  // namespace ccres::kernels::detail
