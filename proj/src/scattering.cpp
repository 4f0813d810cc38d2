#include "ccres/scattering.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ccres/errors.hpp"
#include "ccres/special_functions.hpp"

namespace ccres {

namespace {

constexpr double kDegenerateDet = 1e-300;

struct FreeWaves {
  Eigen::VectorXcd h_in1, h_in2, h_out1, h_out2, j1, j2;
};

FreeWaves free_waves(const ChannelSet& channels, cplx k, double r1, double r2) {
  const int n = channels.size();
  FreeWaves w;
  for (auto* v : {&w.h_in1, &w.h_in2, &w.h_out1, &w.h_out2, &w.j1, &w.j2}) v->resize(n);
  for (int i = 0; i < n; ++i) {
    const int l = channels.l_values[i];
    w.h_in1(i) = riccati_h(l, HankelSign::incoming, k * r1).value;
    w.h_in2(i) = riccati_h(l, HankelSign::incoming, k * r2).value;
    w.h_out1(i) = riccati_h(l, HankelSign::outgoing, k * r1).value;
    w.h_out2(i) = riccati_h(l, HankelSign::outgoing, k * r2).value;
    w.j1(i) = riccati_j(l, k * r1).value;
    w.j2(i) = riccati_j(l, k * r2).value;
  }
  return w;
}

// D(r2) - M D(r1) for diagonal D.
Eigen::MatrixXcd two_point(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& d1,
                           const Eigen::VectorXcd& d2) {
  Eigen::MatrixXcd out = -(m * d1.asDiagonal());
  out.diagonal() += d2;
  return out;
}

Eigen::MatrixXcd ratio_of(const AsymptoticSample& sample) {
  if (sample.r2 <= sample.r1) throw Error(ErrorKind::domain, "matching radii must satisfy r1 < r2");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sample.psi1);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorKind::singular_matrix, "matching: psi1 is numerically singular");
  }
  return sample.psi2 * lu.inverse();
}

cplx determinant(const Eigen::MatrixXcd& a) {
  if (a.rows() == 1) return a(0, 0);
  if (a.rows() == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return a.partialPivLu().determinant();
}

}  // namespace

cplx k_power_product(cplx k, const ChannelSet& channels) {
  cplx p = 1.0;
  for (int l : channels.l_values) p *= std::pow(k, 2 * l + 1);
  return p;
}

SMatrix extract_smatrix(const AsymptoticSample& sample, cplx k, const ChannelSet& channels,
                        double lambda) {
  if (k == cplx{0.0, 0.0}) throw Error(ErrorKind::domain, "extract_smatrix: k = 0");
  const Eigen::MatrixXcd m = ratio_of(sample);
  const FreeWaves w = free_waves(channels, k, sample.r1, sample.r2);
  const Eigen::MatrixXcd a = two_point(m, w.h_out1, w.h_out2);
  const Eigen::MatrixXcd b = two_point(m, w.h_in1, w.h_in2);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  if (!(lu.rcond() > 1e-13)) {
    throw Error(ErrorKind::singular_matrix,
                "extract_smatrix: H+(r2) - M H+(r1) is singular (matching radii too close or k at a pole)");
  }
  return SMatrix{k, lambda, lu.solve(b)};
}

ResidualValue regularized_det(const SMatrix& s, const ChannelSet& channels) {
  const int n = channels.size();
  if (s.s.rows() != n || s.s.cols() != n) {
    throw Error(ErrorKind::domain, "regularized_det: S-matrix size does not match the channel set");
  }
  ResidualValue v;
  v.k_power_product = k_power_product(s.k, channels);
  v.det_s_minus_i = determinant(s.s - Eigen::MatrixXcd::Identity(n, n));
  if (!(std::abs(v.det_s_minus_i) >= kDegenerateDet)) {
    throw Error(ErrorKind::degenerate, "regularized_det: |det(S - I)| below 1e-300");
  }
  v.det_f = v.k_power_product / v.det_s_minus_i;
  return v;
}

ResidualValue matching_residual(const AsymptoticSample& sample, cplx k, const ChannelSet& channels) {
  if (k == cplx{0.0, 0.0}) throw Error(ErrorKind::domain, "matching_residual: k = 0");
  const int n = channels.size();
  const Eigen::MatrixXcd m = ratio_of(sample);
  const FreeWaves w = free_waves(channels, k, sample.r1, sample.r2);
  const cplx det_a = determinant(two_point(m, w.h_out1, w.h_out2));
  const cplx det_j = std::pow(cplx{0.0, -2.0}, n) * determinant(two_point(m, w.j1, w.j2));

  ResidualValue v;
  v.k_power_product = k_power_product(k, channels);
  if (!(std::abs(det_j) >= kDegenerateDet * std::abs(det_a)) || !std::isfinite(std::abs(det_j))) {
    throw Error(ErrorKind::degenerate, "matching_residual: |det(S - I)| below 1e-300");
  }
  v.det_f = v.k_power_product * det_a / det_j;
  v.det_s_minus_i = det_a == cplx{0.0, 0.0} ? cplx{HUGE_VAL, 0.0} : det_j / det_a;
  return v;
}

ResidualValue matched_residual(const MatchedSample& sample, cplx k, const ChannelSet& channels) {
  if (k == cplx{0.0, 0.0}) throw Error(ErrorKind::domain, "matched_residual: k = 0");
  const int n = channels.size();
  const double r1 = sample.asymptotic.r1;
  const double r2 = sample.asymptotic.r2;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  // Q[Φ⁺, Ψ]_m = F_Φ,m+1ᵀ (L_mᵀ R_m - I) F_Ψ,m with L_m = I + G, R_m = I + Y.
  const Eigen::MatrixXcd& g = sample.inward_match;
  const Eigen::MatrixXcd& y = sample.outward_match;
  const cplx x = determinant(g.transpose() + y + g.transpose() * y);

  // Q[Φʲ, Ψ]_{N-1} = (F_Φʲ,N-1ᵀ R_{N-1} - F_Φʲ,Nᵀ) F_Ψ,N-1, with Ĵ scaled by
  // exp(-|Im k| r2) to keep the determinant in range.
  const double scale_log = std::abs(k.imag()) * r2;
  const double scale = std::exp(-scale_log);
  Eigen::VectorXcd j1(n), j2(n);
  cplx log_h = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = channels.l_values[i];
    j1(i) = scale * riccati_j(l, k * r1).value;
    j2(i) = scale * riccati_j(l, k * r2).value;
    log_h += std::log(riccati_h(l, HankelSign::outgoing, k * r2).value);
  }
  const Eigen::MatrixXcd zj = j1.asDiagonal() * sample.factor_last1.transpose() * (id + sample.outward_last) -
                              j2.asDiagonal() * sample.factor_last2.transpose();
  const cplx z = determinant(zj);

  ResidualValue v;
  v.k_power_product = k_power_product(k, channels);
  const cplx log_rest = std::log(determinant(sample.factor_last2)) + log_h + sample.log_inward -
                        sample.log_outward - static_cast<double>(n) * scale_log;
  v.det_f = v.k_power_product / std::pow(cplx{0.0, -2.0}, n) * (x / z) * std::exp(log_rest);
  v.det_s_minus_i = v.k_power_product / v.det_f;
  v.jost = x * std::exp(std::log(determinant(sample.factor_last2)) + log_h + sample.log_inward +
                        sample.log_origin + std::log(determinant(sample.factor_first)));
  if (!std::isfinite(std::abs(v.det_f)) || !(std::abs(v.det_s_minus_i) >= kDegenerateDet)) {
    throw Error(ErrorKind::degenerate, "matched_residual: |det(S - I)| below 1e-300");
  }
  return v;
}

Eigen::MatrixXcd wronskian(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& da,
                           const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& db) {
  return a * db - da * b;
}

SMatrix smatrix_from_wronskian(const Eigen::MatrixXcd& psi, const Eigen::MatrixXcd& dpsi, double r,
                               cplx k, const ChannelSet& channels, double lambda) {
  const int n = channels.size();
  Eigen::MatrixXcd h_in = Eigen::MatrixXcd::Zero(n, n), dh_in = h_in;
  Eigen::MatrixXcd h_out = h_in, dh_out = h_in;
  for (int i = 0; i < n; ++i) {
    const int l = channels.l_values[i];
    const RiccatiValue in = riccati_h(l, HankelSign::incoming, k * r);
    const RiccatiValue out = riccati_h(l, HankelSign::outgoing, k * r);
    h_in(i, i) = in.value;
    dh_in(i, i) = k * in.derivative;
    h_out(i, i) = out.value;
    dh_out(i, i) = k * out.derivative;
  }
  const Eigen::MatrixXcd w_in = wronskian(h_in, dh_in, psi, dpsi);
  const Eigen::MatrixXcd w_out = wronskian(h_out, dh_out, psi, dpsi);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(w_out.transpose());
  if (!(lu.rcond() > 1e-13)) {
    throw Error(ErrorKind::singular_matrix, "smatrix_from_wronskian: W[h+, psi] is singular");
  }
  // S = W_in W_out^{-1}  <=>  S^T = W_out^{-T} W_in^T
  return SMatrix{k, lambda, lu.solve(w_in.transpose()).transpose()};
}

ResidualEvaluator::ResidualEvaluator(PotentialModel model, RadialGrid grid, kernels::Backend backend)
    : solver_(std::move(model), grid, backend) {}

ResidualValue ResidualEvaluator::operator()(cplx k, double lambda) const {
  const WavePoint p{k, lambda};
  return evaluate(std::span<const WavePoint>(&p, 1)).front();
}

std::vector<ResidualValue> ResidualEvaluator::evaluate(std::span<const WavePoint> points) const {
  const auto samples = solver_.propagate_matched(points);
  std::vector<ResidualValue> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back(matched_residual(samples[i], points[i].k, model().channels()));
  }
  return out;
}

SMatrix ResidualEvaluator::smatrix(cplx k, double lambda) const {
  return extract_smatrix(solver_.propagate(k, lambda), k, model().channels(), lambda);
}

ResidualValue residual(const PotentialModel& model, cplx k, double lambda, const RadialGrid& grid) {
  return ResidualEvaluator(model, grid)(k, lambda);
}

}  // namespace ccres
