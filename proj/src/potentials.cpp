#include "ccres/potentials.hpp"

#include <cmath>
#include <string>

#include "ccres/errors.hpp"

namespace ccres {

void ChannelSet::validate() const {
  if (l_values.empty()) throw Error(ErrorKind::config, "channels.l: at least one channel required");
  for (int l : l_values) {
    if (l < 0) throw Error(ErrorKind::config, "channels.l: angular momenta must be >= 0");
  }
  if (!(mu > 0.0)) throw Error(ErrorKind::config, "channels.mu: reduced mass must be positive");
}

PotentialModel::PotentialModel(ChannelSet channels, Eigen::MatrixXd strengths,
                               PotentialFamily family, ParameterIndex parameter,
                               double well_radius)
    : channels_(std::move(channels)),
      strengths_(std::move(strengths)),
      family_(family),
      parameter_(parameter),
      well_radius_(well_radius) {
  channels_.validate();
  const int n = channels_.size();
  if (strengths_.rows() != n || strengths_.cols() != n) {
    throw Error(ErrorKind::config, "potential.strengths: expected a " + std::to_string(n) + "x" +
                                       std::to_string(n) + " matrix");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (strengths_(i, j) != strengths_(j, i)) {
        throw Error(ErrorKind::config, "potential.strengths: matrix must be symmetric");
      }
    }
  }
  if (parameter_.row < 0 || parameter_.row >= n || parameter_.col < 0 || parameter_.col >= n) {
    throw Error(ErrorKind::config, "potential.parameter: index outside the strength matrix");
  }
  if (family_ == PotentialFamily::square_well && !(well_radius_ > 0.0)) {
    throw Error(ErrorKind::config, "potential.radius: square-well radius must be positive");
  }
}

PotentialModel PotentialModel::free(ChannelSet channels) {
  const int n = static_cast<int>(channels.l_values.size());
  return PotentialModel(std::move(channels), Eigen::MatrixXd::Zero(n, n),
                        PotentialFamily::gaussian, ParameterIndex{0, 0});
}

Eigen::MatrixXd PotentialModel::strengths(double lambda) const {
  Eigen::MatrixXd s = strengths_;
  s(parameter_.row, parameter_.col) = lambda;
  s(parameter_.col, parameter_.row) = lambda;
  return s;
}

PotentialModel PotentialModel::with_parameter(double lambda) const {
  PotentialModel copy = *this;
  copy.strengths_ = strengths(lambda);
  return copy;
}

double PotentialModel::profile(double r) const {
  switch (family_) {
    case PotentialFamily::gaussian:
      return std::exp(-r * r);
    case PotentialFamily::square_well:
      return r < well_radius_ ? 1.0 : 0.0;
  }
  return 0.0;
}

std::optional<double> PotentialModel::discontinuity() const {
  if (family_ == PotentialFamily::square_well) return well_radius_;
  return std::nullopt;
}

Eigen::MatrixXd PotentialModel::evaluate(double r, double lambda) const {
  return -profile(r) * strengths(lambda);
}

double PotentialModel::range_radius() const { return effective_range(*this, 1e-12); }

double effective_range(const PotentialModel& model, double tol, std::optional<double> lambda) {
  if (!(tol > 0.0)) throw Error(ErrorKind::domain, "effective_range: tol must be positive");
  const double lam = lambda.value_or(model.parameter());
  const double peak = model.strengths(lam).cwiseAbs().maxCoeff();
  switch (model.family()) {
    case PotentialFamily::gaussian:
      // peak·exp(-R²) = tol
      return peak > tol ? std::sqrt(std::log(peak / tol)) : 0.0;
    case PotentialFamily::square_well:
      return peak > 0.0 ? model.well_radius() : 0.0;
  }
  return 0.0;
}

}  // namespace ccres
