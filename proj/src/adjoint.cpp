#include "swe/adjoint.hpp"

#include <string>

#include "rk3.hpp"
#include "swe/errors.hpp"
#include "swe/observation.hpp"

namespace swe {

AdjointForcing AdjointForcing::observations(const ObservationLayout& layout, ObsMatrix residual) {
  AdjointForcing f;
  f.layout = layout;
  f.obs_residual = std::move(residual);
  return f;
}

AdjointForcing AdjointForcing::volumetric(Levels f_eta, Levels f_u) {
  AdjointForcing f;
  f.f_eta = std::move(f_eta);
  f.f_u = std::move(f_u);
  return f;
}

void AdjointForcing::assemble(const Grid& grid, Levels& eta, Levels& u) const {
  const Index rows = grid.n_levels();
  const Index cols = grid.n_cells();
  eta = Levels::Zero(rows, cols);
  u = Levels::Zero(rows, cols);
  if (layout) eta += inject(obs_residual, *layout, grid);
  auto add = [&](Levels& dst, const Levels& src, const char* name) {
    if (src.size() == 0) return;
    if (src.rows() != rows || src.cols() != cols) {
      throw AlignmentError(std::string("adjoint forcing: ") + name + " shape does not match the grid");
    }
    dst += src;
  };
  add(eta, f_eta, "f_eta");
  add(u, f_u, "f_u");
}

namespace {

struct SweepInputs {
  SweepInputs(const StateTrajectory& b, Levels fe, Levels fu) : base(b), f_eta(std::move(fe)), f_u(std::move(fu)) {}

  const StateTrajectory& base;
  Levels f_eta;
  Levels f_u;
  const StateTrajectory* tangent = nullptr;
  const AdjointSolution* foa = nullptr;
  Field beta_hat;
  bool bathy_integral = false;
};

State forcing_at(const SweepInputs& in, Index n) {
  State f(in.base.grid.n_cells(), 2);
  f.col(0) = in.f_eta.row(n).transpose();
  f.col(1) = in.f_u.row(n).transpose();
  return f;
}

// Transposed SSP-RK3 sweep. For a first-order system only `base` and the
// forcing are used. For a second-order system the tangent stages and the
// first-order stage multipliers add the coupling terms at every stage.
AdjointSolution sweep(const SweepInputs& in) {
  const Grid& grid = in.base.grid;
  const Index n_cells = grid.n_cells();
  const Index N = grid.n_steps();
  const double dt = grid.dt();
  const double dx = grid.dx();
  const double nu = grid.dissipation_coefficient();
  const Field& beta = in.base.beta;
  if (beta.size() != n_cells) throw AlignmentError("adjoint: base trajectory carries no bathymetry");

  AdjointSolution out(grid);
  if (in.bathy_integral) out.bathy_integral = Field::Zero(n_cells);

  const double half = 0.5 * dt;
  State z = -half * forcing_at(in, N);
  out.traj.set_level(N, State::Zero(n_cells, 2));
  out.entry.set_level(N, z);

  const bool second_order = in.tangent != nullptr;

  for (Index n = N - 1; n >= 0; --n) {
    const detail::Rk3Stages ys = detail::trajectory_stages(in.base, n);
    const State* y[3] = {&ys.y0, &ys.y1, &ys.y2};

    detail::Rk3Stages ts;
    State k_foa[3];
    if (second_order) {
      ts = detail::tangent_stages(ys, in.tangent->level(n), beta, in.beta_hat, grid);
      const State z_foa = in.foa->entry.level(n + 1);
      k_foa[2] = (2.0 / 3.0) * dt * z_foa;
      const State y2_foa = (2.0 / 3.0) * z_foa + dynamics::adjoint_operator(ys.y2, k_foa[2], beta, dx, nu);
      k_foa[1] = 0.25 * dt * y2_foa;
      const State y1_foa = 0.25 * y2_foa + dynamics::adjoint_operator(ys.y1, k_foa[1], beta, dx, nu);
      k_foa[0] = dt * y1_foa;
    }
    const State* dys[3] = {&ts.y0, &ts.y1, &ts.y2};

    // Adds A(Y_s)^T k (+ coupling) to `bar` and accumulates the bathymetry integral.
    auto stage = [&](int s, const State& k, State& bar) {
      bar += dynamics::adjoint_operator(*y[s], k, beta, dx, nu);
      if (second_order) bar += dynamics::adjoint_coupling(*dys[s], k_foa[s], in.beta_hat, dx);
      if (in.bathy_integral) {
        out.bathy_integral += dynamics::bathymetry_term(*y[s], k, dx);
        if (second_order) out.bathy_integral += dynamics::bathymetry_term(*dys[s], k_foa[s], dx);
      }
    };

    State bar2 = (2.0 / 3.0) * z;
    stage(2, (2.0 / 3.0) * dt * z, bar2);
    State bar0 = z / 3.0 + 0.75 * bar2;
    State bar1 = 0.25 * bar2;
    stage(1, 0.25 * dt * bar2, bar1);
    bar0 += bar1;
    stage(0, dt * bar1, bar0);

    const State f = forcing_at(in, n);
    State level = bar0 - half * f;
    if (!level.allFinite()) throw DivergenceError("adjoint: non-finite value at level " + std::to_string(n), n);
    out.traj.set_level(n, level);
    z = n > 0 ? State(level - half * f) : level;
    out.entry.set_level(n, z);
  }
  return out;
}

void check_base(const StateTrajectory& base, const StateTrajectory& other, const char* what) {
  if (!base.grid.same_as(other.grid)) throw AlignmentError(std::string(what) + ": grids differ");
}

SweepInputs first_order_inputs(const StateTrajectory& base, const AdjointForcing& forcing) {
  SweepInputs in{base, {}, {}};
  forcing.assemble(base.grid, in.f_eta, in.f_u);
  return in;
}

SweepInputs second_order_inputs(const StateTrajectory& base, const AdjointSolution& foa,
                                const StateTrajectory& tangent, const ObservationLayout& layout) {
  check_base(base, foa.traj, "second-order adjoint");
  check_base(base, tangent, "second-order adjoint");
  SweepInputs in{base, {}, {}};
  AdjointForcing::observations(layout, observe(tangent, layout)).assemble(base.grid, in.f_eta, in.f_u);
  in.tangent = &tangent;
  in.foa = &foa;
  return in;
}

Levels scaled(const Levels& f, double s, const Grid& grid) {
  if (f.size() == 0) return Levels::Zero(grid.n_levels(), grid.n_cells());
  if (f.rows() != grid.n_levels() || f.cols() != grid.n_cells()) {
    throw AlignmentError("forced adjoint: response partial shape does not match the grid");
  }
  return s * f;
}

}  // namespace

AdjointSolution solve_foa_ic(const StateTrajectory& base, const AdjointForcing& forcing) {
  return sweep(first_order_inputs(base, forcing));
}

AdjointSolution solve_foa_bathy(const StateTrajectory& base, const AdjointForcing& forcing) {
  SweepInputs in = first_order_inputs(base, forcing);
  in.bathy_integral = true;
  return sweep(in);
}

AdjointSolution solve_soa_ic(const StateTrajectory& base, const AdjointSolution& foa, const StateTrajectory& tangent,
                             const ObservationLayout& layout) {
  return sweep(second_order_inputs(base, foa, tangent, layout));
}

AdjointSolution solve_soa_bathy(const StateTrajectory& base, const AdjointSolution& foa,
                                const StateTrajectory& tangent, const Field& beta_hat,
                                const ObservationLayout& layout) {
  if (beta_hat.size() != base.grid.n_cells()) throw AlignmentError("soa_bathy: beta_hat length mismatch");
  SweepInputs in = second_order_inputs(base, foa, tangent, layout);
  in.beta_hat = beta_hat;
  in.bathy_integral = true;
  return sweep(in);
}

AdjointSolution solve_forced_foa_ic(const StateTrajectory& base, const Levels& g_eta, const Levels& g_u,
                                    ForcedSign sign) {
  const double s = sign == ForcedSign::Consistent ? -1.0 : 1.0;
  SweepInputs in{base, scaled(g_eta, s, base.grid), scaled(g_u, s, base.grid)};
  return sweep(in);
}

AdjointSolution solve_forced_foa_bathy(const StateTrajectory& base, const Levels& g_eta, const Levels& g_u) {
  SweepInputs in{base, scaled(g_eta, -1.0, base.grid), scaled(g_u, -1.0, base.grid)};
  in.bathy_integral = true;
  return sweep(in);
}

}  // namespace swe
