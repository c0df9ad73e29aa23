#include "swe/sensitivity.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "swe/hash.hpp"
#include "swe/observation.hpp"
#include "swe/parallel.hpp"

namespace swe {

namespace responses {

namespace {

Levels zeros(const Grid& g) { return Levels::Zero(g.n_levels(), g.n_cells()); }

ResponsePartials empty_partials(const Grid& g) { return {zeros(g), zeros(g), Field::Zero(g.n_cells())}; }

// Space-time representer weight of a point functional on the final level.
double terminal_scale(const Grid& g) { return 1.0 / (0.5 * g.dt()); }

}  // namespace

ResponseFunction zero() {
  return {"zero", [](const StateTrajectory&, const Control&) { return 0.0; },
          [](const StateTrajectory& t, const Control&) { return empty_partials(t.grid); }};
}

ResponseFunction control_error(const Field& truth) {
  auto check = [truth](const Control& c) {
    if (c.field.size() != truth.size()) throw AlignmentError("control_error: truth length mismatch");
  };
  return {"control_error",
          [truth, check](const StateTrajectory& t, const Control& c) {
            check(c);
            return 0.5 * inner_l2_space(c.field - truth, c.field - truth, t.grid);
          },
          [truth, check](const StateTrajectory& t, const Control& c) {
            check(c);
            ResponsePartials p = empty_partials(t.grid);
            p.d_control = c.field - truth;
            return p;
          }};
}

ResponseFunction point_height(double x0) {
  return {"point_height",
          [x0](const StateTrajectory& t, const Control&) {
            const Stencil s = interpolation_stencil(t.grid, x0);
            const Index N = t.grid.n_steps();
            return s.w_left * t.eta(N, s.left) + s.w_right * t.eta(N, s.right);
          },
          [x0](const StateTrajectory& t, const Control&) {
            const Stencil s = interpolation_stencil(t.grid, x0);
            const Index N = t.grid.n_steps();
            ResponsePartials p = empty_partials(t.grid);
            const double scale = terminal_scale(t.grid) / t.grid.dx();
            p.d_eta(N, s.left) += scale * s.w_left;
            p.d_eta(N, s.right) += scale * s.w_right;
            return p;
          }};
}

ResponseFunction terminal_energy() {
  return {"terminal_energy",
          [](const StateTrajectory& t, const Control&) {
            const Index N = t.grid.n_steps();
            const auto eta = t.eta.row(N);
            const auto u = t.u.row(N);
            return 0.5 * (eta.square() + (1.0 + eta) * u.square()).sum() * t.grid.dx();
          },
          [](const StateTrajectory& t, const Control&) {
            const Index N = t.grid.n_steps();
            const auto eta = t.eta.row(N);
            const auto u = t.u.row(N);
            ResponsePartials p = empty_partials(t.grid);
            const double scale = terminal_scale(t.grid);
            p.d_eta.row(N) = scale * (eta + 0.5 * u.square());
            p.d_u.row(N) = scale * (1.0 + eta) * u;
            return p;
          }};
}

ResponseFunction combine(double a, const ResponseFunction& g1, const ResponseFunction& g2) {
  return {std::to_string(a) + "*" + g1.name + "+" + g2.name,
          [a, g1, g2](const StateTrajectory& t, const Control& c) { return a * g1.evaluate(t, c) + g2.evaluate(t, c); },
          [a, g1, g2](const StateTrajectory& t, const Control& c) {
            ResponsePartials p1 = g1.partials(t, c);
            const ResponsePartials p2 = g2.partials(t, c);
            p1.d_eta = a * p1.d_eta + p2.d_eta;
            p1.d_u = a * p1.d_u + p2.d_u;
            p1.d_control = a * p1.d_control + p2.d_control;
            return p1;
          }};
}

}  // namespace responses

std::vector<std::string> builtin_responses() { return {"zero", "control_error", "point_height", "terminal_energy"}; }

ResponseFunction make_response(const std::string& name, double x0, const Field& truth) {
  if (name == "zero") return responses::zero();
  if (name == "control_error") return responses::control_error(truth);
  if (name == "point_height") return responses::point_height(x0);
  if (name == "terminal_energy") return responses::terminal_energy();
  throw DomainError("unknown response function '" + name + "'");
}

double response_fd_check(const ResponseFunction& rf, const StateTrajectory& traj, const Control& c, int trials,
                         std::uint64_t seed, double eps) {
  const Grid& g = traj.grid;
  const ResponsePartials p = rf.partials(traj, c);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_levels = [&] { return Levels(Levels::NullaryExpr(g.n_levels(), g.n_cells(), [&] { return normal(rng); })); };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Levels de = random_levels();
    const Levels du = random_levels();
    const Field dc = Field::NullaryExpr(g.n_cells(), [&] { return normal(rng); });
    auto shifted = [&](double s) {
      StateTrajectory tr = traj;
      tr.eta += s * de;
      tr.u += s * du;
      return rf.evaluate(tr, Control{c.kind, c.field + s * dc});
    };
    const double fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
    const double an = inner_l2_spacetime(p.d_eta, de, g) + inner_l2_spacetime(p.d_u, du, g) +
                      inner_l2_space(p.d_control, dc, g);
    const double scale = std::max({std::abs(fd), std::abs(an), 1e-300});
    if (fd != an) worst = std::max(worst, std::abs(fd - an) / scale);
  }
  return worst;
}

Field assemble_F_ic(const StateTrajectory& base, const Control& c, const ResponseFunction& rf, ForcedSign sign) {
  const ResponsePartials p = rf.partials(base, c);
  const AdjointSolution psi = solve_forced_foa_ic(base, p.d_eta, p.d_u, sign);
  return p.d_control + psi.traj.eta.row(0).transpose();
}

Field assemble_F_bathy(const StateTrajectory& base, const Control& c, const ResponseFunction& rf) {
  const ResponsePartials p = rf.partials(base, c);
  const AdjointSolution gamma = solve_forced_foa_bathy(base, p.d_eta, p.d_u);
  return p.d_control - gamma.bathy_integral;
}

namespace {

SensitivityResult run_sensitivity(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                                  const SensitivityOptions& options) {
  if (optimum.kind != p.kind) throw DomainError("sensitivity: control kind does not match the problem");
  const HessianOperator op(p, optimum, options.tikhonov);
  const Grid& grid = p.grid;

  const double ref = options.reference_gradient_norm > 0.0 ? options.reference_gradient_norm
                                                           : norm_l2_space(gradient(p, p.first_guess), grid);
  const double gnorm = norm_l2_space(op.evaluation().gradient, grid);
  if (gnorm > options.optimality_factor * ref) {
    throw PreconditionError("sensitivity: control is not optimal (|grad J| = " + std::to_string(gnorm) +
                            ", required <= " + std::to_string(options.optimality_factor * ref) + ")");
  }

  const StateTrajectory& base = op.evaluation().base;
  SensitivityResult res;
  res.F = p.kind == ControlKind::InitialCondition ? assemble_F_ic(base, optimum, rf, options.sign)
                                                  : assemble_F_bathy(base, optimum, rf);
  res.cg = solve_hnu_f(op, res.F, options.cg_rel_tol, options.cg_max_iter);
  res.nu = res.cg.solution;
  const StateTrajectory p3 =
      p.kind == ControlKind::InitialCondition ? solve_tangent_ic(base, res.nu) : solve_tangent_bathy(base, res.nu);
  res.dG_dm = observe(p3, p.observations.layout);
  if (!res.dG_dm.allFinite()) throw DivergenceError("sensitivity: non-finite result", grid.n_steps());
  res.point_hash = field_hash(optimum.field);
  return res;
}

}  // namespace

SensitivityResult sensitivity_ic(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                                 const SensitivityOptions& options) {
  if (p.kind != ControlKind::InitialCondition) throw DomainError("sensitivity_ic on a bathymetry problem");
  return run_sensitivity(p, optimum, rf, options);
}

SensitivityResult sensitivity_bathy(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                                    const SensitivityOptions& options) {
  if (p.kind != ControlKind::Bathymetry) throw DomainError("sensitivity_bathy on an initial-condition problem");
  return run_sensitivity(p, optimum, rf, options);
}

SensitivityResult sensitivity(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                              const SensitivityOptions& options) {
  return run_sensitivity(p, optimum, rf, options);
}

ObsMatrix oracle_sensitivity(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                             const OracleOptions& options) {
  if (!(options.delta > 0.0)) throw DomainError("oracle: delta must be positive");
  const ObservationLayout& layout = p.observations.layout;
  std::vector<std::pair<Index, Index>> samples = options.samples;
  if (samples.empty()) {
    for (Index k = 0; k < layout.n_times(); ++k) {
      for (Index j = 0; j < layout.n_obs(); ++j) samples.emplace_back(j, k);
    }
  }
  for (const auto& [j, k] : samples) {
    if (j < 0 || j >= layout.n_obs() || k < 0 || k >= layout.n_times()) {
      throw OracleError("oracle: sample index out of range", j, k);
    }
  }

  DescentOptions descent;
  descent.max_iters = options.max_iters;
  descent.flat_cost_tol = options.flat_cost_tol;
  descent.abs_tol = options.rel_tol * norm_l2_space(gradient(p, p.first_guess), p.grid);

  auto reoptimised_response = [&](Index j, Index k, double shift) {
    ObsMatrix heights = p.observations.heights;
    heights(j, k) += shift;
    const AssimilationProblem q(p.grid, p.kind, p.known, ObservationSet(layout, std::move(heights)), optimum);
    DescentReport rep;
    try {
      rep = descend(q, descent);
    } catch (const Error& e) {
      throw OracleError(std::string("oracle: re-optimisation failed: ") + e.what(), j, k);
    }
    if (!rep.converged) throw OracleError("oracle: re-optimisation did not converge", j, k);
    const StateTrajectory traj = solve_forward(q.forward_problem(rep.final_control));
    return rf.evaluate(traj, rep.final_control);
  };

  ObsMatrix out = ObsMatrix::Constant(layout.n_obs(), layout.n_times(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> values(samples.size());
  parallel_for(static_cast<Index>(samples.size()), options.threads, [&](Index s) {
    const auto [j, k] = samples[static_cast<std::size_t>(s)];
    const double gp = reoptimised_response(j, k, options.delta);
    const double gm = reoptimised_response(j, k, -options.delta);
    values[static_cast<std::size_t>(s)] = (gp - gm) / (2.0 * options.delta * layout.time_weights()(k));
  });
  for (std::size_t s = 0; s < samples.size(); ++s) out(samples[s].first, samples[s].second) = values[s];
  return out;
}

}  // namespace swe
