#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ccres/continuation.hpp"
#include "ccres/potentials.hpp"
#include "ccres/radial_solver.hpp"
#include "ccres/rootfinding.hpp"

namespace ccres {

/// Run description read from a flat `section.key = value` file.
///
///   channels.l            = 0 1            (whitespace or comma separated)
///   channels.mu           = 1.0
///   potential.family      = gaussian | square_well
///   potential.strengths   = 7 0.5 ; 0.5 20 (rows separated by ';')
///   potential.parameter   = 2 2            (1-based row and column of λ)
///   potential.radius      = 1.0            (square_well only)
///   grid.r_max            = 4.6
///   grid.n_points         = 4096
///   newton.tol, newton.max_iter
///   continuation.h_min, .h_max, .h_initial, .lambda_min, .lambda_max, .max_points
///                         (the corrector tolerance is newton.tol)
///   starts.mode           = scan | list
///   starts.k              = 3.623677i, 0.9035406i   (complex literals a, bi, a+bi)
///   starts.k_max          = 5                        (scan ceiling on Im k)
///   check.seed            = 12345
///
/// `#` starts a comment. Unknown keys and repeated keys are errors.
struct RunConfig {
  ChannelSet channels;
  PotentialFamily family = PotentialFamily::gaussian;
  Eigen::MatrixXd strengths;
  ParameterIndex parameter;
  double well_radius = 1.0;
  RadialGrid grid;
  NewtonOptions newton;
  ContinuationOptions continuation;
  bool scan_starts = true;
  std::vector<cplx> start_k;
  double scan_k_max = 5.0;
  std::uint64_t seed = 20240611;

  PotentialModel model() const;
  /// The continuation parameter's value in the strength matrix.
  double lambda() const { return strengths(parameter.row, parameter.col); }
};

/// Throws Error(config) naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks everything the solver would reject later; messages name fields.
void validate(const RunConfig& config);

}  // namespace ccres
