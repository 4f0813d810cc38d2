#pragma once

#include <Eigen/Core>

#include "ccres/potentials.hpp"
#include "ccres/radial_solver.hpp"

namespace fixtures {

using ccres::ChannelSet;
using ccres::ParameterIndex;
using ccres::PotentialFamily;
using ccres::PotentialModel;

inline Eigen::MatrixXd matrix2(double a, double b, double c) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, b, c;
  return m;
}

inline PotentialModel single(int l, double strength) {
  return PotentialModel(ChannelSet{{l}, 1.0}, Eigen::MatrixXd::Constant(1, 1, strength),
                        PotentialFamily::gaussian, ParameterIndex{0, 0});
}

/// s/p wells 7 and λ₂₂ coupled by 0.5; λ₂₂ is the parameter (stored 20).
inline PotentialModel sp_system() {
  return PotentialModel(ChannelSet{{0, 1}, 1.0}, matrix2(7.0, 0.5, 20.0), PotentialFamily::gaussian,
                        ParameterIndex{1, 1});
}

/// p/d wells 10 and λ₂₂ coupled by 0.3; λ₂₂ is the parameter (stored 30).
inline PotentialModel pd_system() {
  return PotentialModel(ChannelSet{{1, 2}, 1.0}, matrix2(10.0, 0.3, 30.0), PotentialFamily::gaussian,
                        ParameterIndex{1, 1});
}

inline PotentialModel square_well(double depth, double radius) {
  return PotentialModel(ChannelSet{{0}, 1.0}, Eigen::MatrixXd::Constant(1, 1, depth),
                        PotentialFamily::square_well, ParameterIndex{0, 0}, radius);
}

inline ccres::RadialGrid default_grid() { return ccres::RadialGrid{4.6, 4096}; }

/// Radius 1 lands on node 2^15; fine enough for 1e-8 against the closed form.
inline ccres::RadialGrid square_well_grid() { return ccres::RadialGrid{2.0, 65536}; }

}  // namespace fixtures
