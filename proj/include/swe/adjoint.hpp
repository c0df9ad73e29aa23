#pragma once

#include <optional>

#include "swe/types.hpp"

namespace swe {

/// Right-hand side f of a backward system written as
///   d/dt (a, b) + A(eta, u)^T (a, b) = f,   (a, b)(T) = 0.
///
/// `obs_residual` is scattered with `inject`; `f_eta` / `f_u` are space-time
/// fields (one row per level) added on top. Either part may be absent.
struct AdjointForcing {
  std::optional<ObservationLayout> layout;
  ObsMatrix obs_residual;
  Levels f_eta;
  Levels f_u;

  static AdjointForcing observations(const ObservationLayout& layout, ObsMatrix residual);
  static AdjointForcing volumetric(Levels f_eta, Levels f_u);

  bool empty() const { return !layout && f_eta.size() == 0 && f_u.size() == 0; }

  /// Combined space-time representer of the forcing on `grid`.
  void assemble(const Grid& grid, Levels& eta, Levels& u) const;
};

/// Sign of the response-function forcing in the forced first-order adjoint
/// systems. `Consistent` gives d(response)/d(control); `LiteralIc`
/// reproduces the literal right-hand side +dG/deta of the initial-condition
/// system.
enum class ForcedSign { Consistent, LiteralIc };

/// Backward solution of one adjoint system.
///
/// The transposed SSP-RK3 step is used, so every inner product identity
/// against the tangent solvers holds to rounding. Forcing at interior levels
/// is split into halves on either side of the level, so `traj` vanishes at the
/// final level and holds the fully forced value at level 0. `entry` is the
/// value carried into the step toward earlier times; second-order sweeps
/// rebuild the stage multipliers from it.
struct AdjointSolution {
  StateTrajectory traj;
  StateTrajectory entry;
  /// Time integral of u d(a)/dx accumulated stage by stage; filled by the
  /// bathymetry solvers, empty otherwise.
  Field bathy_integral;

  explicit AdjointSolution(const Grid& g) : traj(g), entry(g) {}
};

/// First-order adjoint of the initial-condition problem.
AdjointSolution solve_foa_ic(const StateTrajectory& base, const AdjointForcing& forcing);

/// First-order adjoint of the bathymetry problem; fills `bathy_integral`.
AdjointSolution solve_foa_bathy(const StateTrajectory& base, const AdjointForcing& forcing);

/// Second-order adjoint for the initial-condition Hessian: coupling terms
/// u_hat d(eta*)/dx, eta_hat d(eta*)/dx, u_hat d(u*)/dx and forcing
/// H^T H eta_hat.
AdjointSolution solve_soa_ic(const StateTrajectory& base, const AdjointSolution& foa, const StateTrajectory& tangent,
                             const ObservationLayout& layout);

/// Second-order adjoint for the bathymetry Hessian; adds the -beta_hat
/// d(eta*)/dx coupling and accumulates int (u_hat d(eta*)/dx + u d(eta_bar)/dx) dt.
AdjointSolution solve_soa_bathy(const StateTrajectory& base, const AdjointSolution& foa,
                                const StateTrajectory& tangent, const Field& beta_hat,
                                const ObservationLayout& layout);

/// Forced first-order adjoint driven by response partials (space-time
/// representers of dG/deta and dG/du).
AdjointSolution solve_forced_foa_ic(const StateTrajectory& base, const Levels& g_eta, const Levels& g_u,
                                    ForcedSign sign = ForcedSign::Consistent);

AdjointSolution solve_forced_foa_bathy(const StateTrajectory& base, const Levels& g_eta, const Levels& g_u);

}  // namespace swe
