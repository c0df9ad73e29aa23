#include "swe/swe_solver.hpp"

#include <cmath>
#include <string>

#include "rk3.hpp"
#include "swe/errors.hpp"

namespace swe {

namespace {

void check_state(const State& y, const Field& beta, const Grid& grid, Index level) {
  if (!y.allFinite()) throw DivergenceError("non-finite state at level " + std::to_string(level), level);
  const Field depth = 1.0 + y.col(0) - beta;
  const double min_depth = depth.minCoeff();
  if (!(min_depth > 0.0)) {
    throw DryingError("depth 1 + eta - beta = " + std::to_string(min_depth) + " at level " + std::to_string(level),
                      level);
  }
  const double speed = (y.col(1).abs() + depth.sqrt()).maxCoeff();
  const double courant = speed * grid.dt() / grid.dx();
  if (courant > grid.c_cfl()) {
    throw StabilityError("courant number " + std::to_string(courant) + " exceeds " + std::to_string(grid.c_cfl()) +
                             " at level " + std::to_string(level),
                         level);
  }
}

}  // namespace

ForwardProblem::ForwardProblem(const Grid& g, Field initial_height, Field bathymetry)
    : grid(g), phi(std::move(initial_height)), beta(std::move(bathymetry)) {
  if (phi.size() != grid.n_cells() || beta.size() != grid.n_cells()) {
    throw AlignmentError("forward problem: phi and beta must have n_cells entries");
  }
  if (!phi.allFinite() || !beta.allFinite()) throw DomainError("forward problem: non-finite input field");
  if (!((1.0 + phi - beta).minCoeff() > 0.0)) throw DomainError("forward problem: initial depth must be positive");
}

StateTrajectory solve_forward(const ForwardProblem& problem) {
  const Grid& grid = problem.grid;
  const double dx = grid.dx();
  const double dt = grid.dt();
  const double nu = grid.dissipation_coefficient();
  StateTrajectory traj(grid);
  traj.beta = problem.beta;
  traj.stages.resize(grid.n_steps(), 4 * grid.n_cells());

  State y(grid.n_cells(), 2);
  y.col(0) = problem.phi;
  y.col(1).setZero();
  check_state(y, problem.beta, grid, 0);
  traj.set_level(0, y);

  auto rhs = [&](const State& s, int) { return dynamics::rhs(s, problem.beta, dx, nu); };
  for (Index n = 0; n < grid.n_steps(); ++n) {
    const detail::Rk3Stages stages = detail::base_stages(y, problem.beta, grid);
    detail::store_stages(traj.stages, n, stages);
    y = detail::rk3_finish(stages, dt, rhs);
    check_state(y, problem.beta, grid, n + 1);
    traj.set_level(n + 1, y);
  }
  return traj;
}

StateTrajectory solve_tangent(const StateTrajectory& base, const Field& eta_initial, const Field& beta_hat) {
  const Grid& grid = base.grid;
  const Index n_cells = grid.n_cells();
  if ((eta_initial.size() != 0 && eta_initial.size() != n_cells) ||
      (beta_hat.size() != 0 && beta_hat.size() != n_cells)) {
    throw AlignmentError("tangent: perturbation length does not match the grid");
  }
  if (base.beta.size() != n_cells) throw AlignmentError("tangent: base trajectory carries no bathymetry");

  const double dx = grid.dx();
  const double nu = grid.dissipation_coefficient();
  StateTrajectory out(grid);
  State dy = State::Zero(n_cells, 2);
  if (eta_initial.size() != 0) dy.col(0) = eta_initial;
  out.set_level(0, dy);

  for (Index n = 0; n < grid.n_steps(); ++n) {
    const detail::Rk3Stages base_st = detail::trajectory_stages(base, n);
    const detail::Rk3Stages tan_st = detail::tangent_stages(base_st, dy, base.beta, beta_hat, grid);
    dy = detail::rk3_finish(tan_st, grid.dt(), [&](const State& d, int) {
      return dynamics::tangent_rhs(base_st.y2, d, base.beta, beta_hat, dx, nu);
    });
    if (!dy.allFinite()) throw DivergenceError("tangent: non-finite state at level " + std::to_string(n + 1), n + 1);
    out.set_level(n + 1, dy);
  }
  return out;
}

StateTrajectory solve_tangent_ic(const StateTrajectory& base, const Field& eta_dd) {
  if (eta_dd.size() != base.grid.n_cells()) throw AlignmentError("tangent_ic: perturbation length mismatch");
  return solve_tangent(base, eta_dd, Field());
}

StateTrajectory solve_tangent_bathy(const StateTrajectory& base, const Field& beta_hat) {
  if (beta_hat.size() != base.grid.n_cells()) throw AlignmentError("tangent_bathy: perturbation length mismatch");
  return solve_tangent(base, Field(), beta_hat);
}

double mass(const StateTrajectory& traj, Index level) {
  if (level < 0 || level >= traj.grid.n_levels()) {
    throw DomainError("mass: level " + std::to_string(level) + " out of range");
  }
  return traj.eta.row(level).sum() * traj.grid.dx();
}

}  // namespace swe
