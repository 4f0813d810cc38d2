#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace ccres {

/// Angular momenta of the coupled channels and the reduced mass (ħ = 1).
struct ChannelSet {
  std::vector<int> l_values;
  double mu = 1.0;

  int size() const { return static_cast<int>(l_values.size()); }

  /// Throws Error(config) if empty, a negative l, or non-positive mass.
  void validate() const;
};

enum class PotentialFamily { gaussian, square_well };

/// Zero-based (row, col) of the strength entry that acts as the continuation
/// parameter. The mirrored entry (col, row) always follows it.
struct ParameterIndex {
  int row = 0;
  int col = 0;
};

/// Separable channel potential V_ij(r, λ) = -λ_ij · g(r) with
///   gaussian:     g(r) = exp(-r²)
///   square_well:  g(r) = 1 for r < R₀, 0 otherwise.
/// Exactly one strength entry is the free parameter λ; the rest are frozen.
class PotentialModel {
public:
  PotentialModel(ChannelSet channels, Eigen::MatrixXd strengths,
                 PotentialFamily family, ParameterIndex parameter,
                 double well_radius = 1.0);

  /// All strengths zero; useful as the free-particle reference.
  static PotentialModel free(ChannelSet channels);

  const ChannelSet& channels() const { return channels_; }
  int size() const { return channels_.size(); }
  PotentialFamily family() const { return family_; }
  ParameterIndex parameter_index() const { return parameter_; }
  double well_radius() const { return well_radius_; }

  /// Value of the continuation parameter stored in the strength matrix.
  double parameter() const { return strengths_(parameter_.row, parameter_.col); }

  /// Strength matrix with the continuation entry (and its mirror) set to lambda.
  Eigen::MatrixXd strengths(double lambda) const;
  const Eigen::MatrixXd& strengths() const { return strengths_; }

  /// Copy of the model whose stored parameter is lambda.
  PotentialModel with_parameter(double lambda) const;

  double profile(double r) const;

  /// Left/right limits of the profile at its jump, if the family has one.
  std::optional<double> discontinuity() const;

  Eigen::MatrixXd evaluate(double r, double lambda) const;

  /// Radius R with max_ij |V_ij(r)| < 1e-12 for all r >= R.
  double range_radius() const;

private:
  ChannelSet channels_;
  Eigen::MatrixXd strengths_;
  PotentialFamily family_;
  ParameterIndex parameter_;
  double well_radius_;
};

/// Smallest R such that max_ij |V_ij(r, lambda)| < tol for every r >= R.
/// Uses the stored parameter when lambda is not given.
double effective_range(const PotentialModel& model, double tol,
                       std::optional<double> lambda = std::nullopt);

}  // namespace ccres
