#pragma once

#include "swe/types.hpp"

namespace swe {

/// Initial height `phi` over bathymetry `beta`; the initial velocity is zero.
struct ForwardProblem {
  Grid grid;
  Field phi;
  Field beta;

  /// Checks field lengths and positive initial depth 1 + phi - beta.
  ForwardProblem(const Grid& g, Field initial_height, Field bathymetry);
};

/// Nonlinear shallow water solve: central differences in flux form,
/// fourth-difference dissipation, SSP-RK3 in time.
///
/// Throws DryingError, StabilityError (dynamic CFL) or DivergenceError.
StateTrajectory solve_forward(const ForwardProblem& problem);

/// Linearised model about `base` started from (eta_dd, 0).
StateTrajectory solve_tangent_ic(const StateTrajectory& base, const Field& eta_dd);

/// Linearised model about `base` driven by a bathymetry perturbation, started
/// from rest.
StateTrajectory solve_tangent_bathy(const StateTrajectory& base, const Field& beta_hat);

/// Both perturbations at once; either may be empty.
StateTrajectory solve_tangent(const StateTrajectory& base, const Field& eta_initial, const Field& beta_hat);

/// sum_i eta_i dx at one level.
double mass(const StateTrajectory& traj, Index level);

}  // namespace swe
