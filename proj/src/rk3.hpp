#pragma once

// Shu-Osher SSP-RK3 stage bookkeeping shared by the forward, tangent and
// adjoint sweeps. The adjoint sweeps recompute stages from stored levels, so
// every caller must go through these helpers to stay bit-identical with the
// forward solve.

#include "swe/dynamics.hpp"
#include "swe/types.hpp"

namespace swe::detail {

struct Rk3Stages {
  State y0;
  State y1;
  State y2;
};

template <typename Rhs>
Rk3Stages rk3_stages(const State& y0, double dt, Rhs&& rhs) {
  Rk3Stages s;
  s.y0 = y0;
  s.y1 = y0 + dt * rhs(y0, 0);
  s.y2 = 0.75 * y0 + 0.25 * (s.y1 + dt * rhs(s.y1, 1));
  return s;
}

template <typename Rhs>
State rk3_finish(const Rk3Stages& s, double dt, Rhs&& rhs) {
  return s.y0 / 3.0 + (2.0 / 3.0) * (s.y2 + dt * rhs(s.y2, 2));
}

inline Rk3Stages base_stages(const State& y0, const Field& beta, const Grid& grid) {
  const double dx = grid.dx();
  const double nu = grid.dissipation_coefficient();
  return rk3_stages(y0, grid.dt(), [&](const State& y, int) { return dynamics::rhs(y, beta, dx, nu); });
}

inline void store_stages(Levels& stages, Index n, const Rk3Stages& s) {
  const Index m = s.y0.rows();
  stages.row(n).segment(0, m) = s.y1.col(0).transpose();
  stages.row(n).segment(m, m) = s.y1.col(1).transpose();
  stages.row(n).segment(2 * m, m) = s.y2.col(0).transpose();
  stages.row(n).segment(3 * m, m) = s.y2.col(1).transpose();
}

/// Stages of step n of a forward record, from the cache when present.
inline Rk3Stages trajectory_stages(const StateTrajectory& traj, Index n) {
  if (traj.stages.rows() == 0) return base_stages(traj.level(n), traj.beta, traj.grid);
  const Index m = traj.grid.n_cells();
  Rk3Stages s;
  s.y0 = traj.level(n);
  s.y1.resize(m, 2);
  s.y2.resize(m, 2);
  s.y1.col(0) = traj.stages.row(n).segment(0, m).transpose();
  s.y1.col(1) = traj.stages.row(n).segment(m, m).transpose();
  s.y2.col(0) = traj.stages.row(n).segment(2 * m, m).transpose();
  s.y2.col(1) = traj.stages.row(n).segment(3 * m, m).transpose();
  return s;
}

inline Rk3Stages tangent_stages(const Rk3Stages& base, const State& dy0, const Field& beta, const Field& beta_hat,
                                const Grid& grid) {
  const double dx = grid.dx();
  const double nu = grid.dissipation_coefficient();
  const State* ys[3] = {&base.y0, &base.y1, &base.y2};
  return rk3_stages(dy0, grid.dt(), [&](const State& dy, int stage) {
    return dynamics::tangent_rhs(*ys[stage], dy, beta, beta_hat, dx, nu);
  });
}

}  // namespace swe::detail
