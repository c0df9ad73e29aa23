#pragma once

#include "swe/types.hpp"

namespace swe {

/// Linear-interpolation weights of one station on the periodic grid.
struct Stencil {
  Index left;
  Index right;
  double w_left;
  double w_right;
};

Stencil interpolation_stencil(const Grid& grid, double x);

/// Observation operator H: samples eta at every (station, sample time).
ObsMatrix observe(const StateTrajectory& traj, const ObservationLayout& layout);
ObsMatrix observe(const Levels& eta, const Grid& grid, const ObservationLayout& layout);

/// Adjoint of `observe` with respect to the weighted observation product and
/// the space-time product: returns a (n_levels x n_cells) field with
/// <observe(w), r>_obs == <w, inject(r)>_spacetime.
Levels inject(const ObsMatrix& residual, const ObservationLayout& layout, const Grid& grid);

/// sum_i a_i b_i dx
double inner_l2_space(const Field& a, const Field& b, const Grid& grid);
double norm_l2_space(const Field& a, const Grid& grid);

/// Trapezoidal in time, rectangle rule in space.
double inner_l2_spacetime(const Levels& a, const Levels& b, const Grid& grid);

/// sum_k w_k sum_j a_jk b_jk with the layout's trapezoidal time weights.
double inner_obs(const ObsMatrix& a, const ObsMatrix& b, const ObservationLayout& layout);

}  // namespace swe
