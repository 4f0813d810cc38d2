#include "ccres/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccres/errors.hpp"

namespace ccres::oracles {

cplx square_well_smatrix(int l, double depth, double radius, double mu, cplx k) {
  if (l != 0) throw Error(ErrorKind::domain, "square_well_smatrix: only l = 0 is implemented");
  if (!(radius > 0.0)) throw Error(ErrorKind::domain, "square_well_smatrix: radius must be positive");
  if (k == cplx{0.0, 0.0}) throw Error(ErrorKind::domain, "square_well_smatrix: k = 0");

  const cplx i{0.0, 1.0};
  const cplx phase = std::exp(-2.0 * i * k * radius);
  const cplx kappa = std::sqrt(k * k + 2.0 * mu * depth);
  const cplx x = kappa * radius;

  cplx inner;  // κ cot κR
  if (std::abs(x) < 1e-4) {
    const cplx x2 = x * x;
    inner = (1.0 - x2 / 3.0 - x2 * x2 / 45.0) / radius;
  } else {
    const cplx s = std::sin(x);
    const cplx c = std::cos(x);
    if (std::abs(s) <= 1e-15 * std::abs(c)) return phase;
    inner = kappa * c / s;
  }
  return phase * (inner + i * k) / (inner - i * k);
}

namespace {

struct BandedOperator {
  int channels = 0;
  int nodes = 0;
  double h = 0.0;
  // Row-major channel blocks per node: diagonal block (symmetric) at each node;
  // the off-diagonal node blocks are -1/h² on the channel diagonal.
  std::vector<double> blocks;

  int dim() const { return channels * nodes; }
  int bandwidth() const { return channels; }

  // Entry (row, col) for |row - col| <= channels.
  double at(int row, int col) const {
    const int n = channels;
    const int node_r = row / n, node_c = col / n;
    const int ch_r = row % n, ch_c = col % n;
    if (node_r == node_c) {
      return blocks[(static_cast<std::size_t>(node_r) * n + ch_r) * n + ch_c];
    }
    if (std::abs(node_r - node_c) == 1 && ch_r == ch_c) return -1.0 / (h * h);
    return 0.0;
  }
};

BandedOperator assemble(const PotentialModel& model, double lambda, int n_grid, double r_max) {
  if (n_grid < 200) throw Error(ErrorKind::config, "fd_bound_states: n_grid must be at least 200");
  if (!(r_max > 0.0)) throw Error(ErrorKind::config, "fd_bound_states: r_max must be positive");
  const int n = model.size();
  const double mu = model.channels().mu;
  BandedOperator op;
  op.channels = n;
  op.nodes = n_grid;
  op.h = r_max / (n_grid + 1);
  op.blocks.assign(static_cast<std::size_t>(n_grid) * n * n, 0.0);
  for (int j = 0; j < n_grid; ++j) {
    const double r = (j + 1) * op.h;
    const Eigen::MatrixXd v = model.evaluate(r, lambda);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double value = 2.0 * mu * v(a, b);
        if (a == b) {
          const double l = model.channels().l_values[a];
          value += 2.0 / (op.h * op.h) + l * (l + 1.0) / (r * r);
        }
        op.blocks[(static_cast<std::size_t>(j) * n + a) * n + b] = value;
      }
    }
  }
  return op;
}

// Number of eigenvalues below sigma (Sylvester inertia of the LDLᵀ factors).
int count_below(const BandedOperator& op, double sigma, std::vector<double>& lower,
                std::vector<double>& d) {
  const int dim = op.dim();
  const int b = op.bandwidth();
  // lower[i*b + (i-j-1)] holds L(i, j) for i-b <= j < i.
  lower.assign(static_cast<std::size_t>(dim) * b, 0.0);
  d.assign(dim, 0.0);
  auto l_at = [&](int i, int j) -> double& { return lower[static_cast<std::size_t>(i) * b + (i - j - 1)]; };
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  int negatives = 0;
  for (int i = 0; i < dim; ++i) {
    const int first = std::max(0, i - b);
    for (int j = first; j < i; ++j) {
      double s = op.at(i, j);
      for (int m = first; m < j; ++m) s -= l_at(i, m) * l_at(j, m) * d[m];
      l_at(i, j) = s / d[j];
    }
    double di = op.at(i, i) - sigma;
    for (int m = first; m < i; ++m) di -= l_at(i, m) * l_at(i, m) * d[m];
    if (di == 0.0) di = -tiny;
    d[i] = di;
    if (di < 0.0) ++negatives;
  }
  return negatives;
}

double gershgorin_lower(const BandedOperator& op) {
  const int dim = op.dim();
  const int b = op.bandwidth();
  double low = 0.0;
  for (int i = 0; i < dim; ++i) {
    double radius = 0.0;
    for (int j = std::max(0, i - b); j <= std::min(dim - 1, i + b); ++j) {
      if (j != i) radius += std::abs(op.at(i, j));
    }
    low = std::min(low, op.at(i, i) - radius);
  }
  return low;
}

FDSpectrum to_spectrum(std::vector<double> eigenvalues, int n_grid, double r_max, double h) {
  FDSpectrum out;
  out.n_grid = n_grid;
  out.r_max = r_max;
  out.h = h;
  std::sort(eigenvalues.begin(), eigenvalues.end());
  for (double e : eigenvalues) {
    // e = 2μE, so k = i·sqrt(-2μE) = i·sqrt(-e).
    if (e < 0.0) out.bound_k.emplace_back(0.0, std::sqrt(-e));
  }
  return out;
}

}  // namespace

FDSpectrum fd_bound_states(const PotentialModel& model, double lambda, int n_grid, double r_max) {
  const BandedOperator op = assemble(model, lambda, n_grid, r_max);
  std::vector<double> lower, d;
  const int negative = count_below(op, 0.0, lower, d);
  const double floor = gershgorin_lower(op) - 1.0;

  std::vector<double> eigenvalues;
  eigenvalues.reserve(negative);
  for (int index = 0; index < negative; ++index) {
    // Smallest sigma with more than `index` eigenvalues below it.
    double lo = floor, hi = 0.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(op, mid, lower, d) > index) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    eigenvalues.push_back(0.5 * (lo + hi));
  }
  return to_spectrum(std::move(eigenvalues), n_grid, r_max, op.h);
}

FDSpectrum fd_bound_states_dense(const PotentialModel& model, double lambda, int n_grid,
                                 double r_max) {
  const BandedOperator op = assemble(model, lambda, n_grid, r_max);
  const int dim = op.dim();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = std::max(0, i - op.bandwidth()); j <= std::min(dim - 1, i + op.bandwidth()); ++j) {
      dense(i, j) = op.at(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd values = solver.eigenvalues();
  return to_spectrum(std::vector<double>(values.data(), values.data() + values.size()), n_grid,
                     r_max, op.h);
}

}  // namespace ccres::oracles
