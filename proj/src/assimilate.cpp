#include "swe/assimilate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "swe/observation.hpp"

namespace swe {

AssimilationProblem::AssimilationProblem(const Grid& g, ControlKind k, Field known_counterpart, ObservationSet obs,
                                         Control guess)
    : grid(g), kind(k), known(std::move(known_counterpart)), observations(std::move(obs)), first_guess(std::move(guess)) {
  if (first_guess.kind != kind) throw DomainError("first guess kind does not match the problem kind");
  if (known.size() != grid.n_cells() || first_guess.field.size() != grid.n_cells()) {
    throw AlignmentError("assimilation problem: fields must have n_cells entries");
  }
  if (observations.layout.dt() != grid.dt() || observations.layout.levels().back() > grid.n_steps()) {
    throw AlignmentError("assimilation problem: observations are not on the grid's time levels");
  }
  for (Index j = 0; j < observations.layout.n_obs(); ++j) interpolation_stencil(grid, observations.layout.positions()[j]);
}

ForwardProblem AssimilationProblem::forward_problem(const Control& c) const {
  if (c.kind != kind) throw DomainError("control kind does not match the problem kind");
  if (kind == ControlKind::InitialCondition) return ForwardProblem(grid, c.field, known);
  return ForwardProblem(grid, known, c.field);
}

namespace {

double misfit_cost(const ObsMatrix& residual, const ObservationLayout& layout) {
  return 0.5 * inner_obs(residual, residual, layout);
}

}  // namespace

double cost(const AssimilationProblem& p, const Control& c) {
  const StateTrajectory traj = solve_forward(p.forward_problem(c));
  const ObsMatrix residual = observe(traj, p.observations.layout) - p.observations.heights;
  return misfit_cost(residual, p.observations.layout);
}

namespace {

// Forward half of an evaluation: trajectory, residual and cost.
Evaluation evaluate_cost(const AssimilationProblem& p, const Control& c) {
  StateTrajectory base = solve_forward(p.forward_problem(c));
  const ObservationLayout& layout = p.observations.layout;
  ObsMatrix residual = observe(base, layout) - p.observations.heights;
  const double j = misfit_cost(residual, layout);
  return Evaluation{std::move(base), std::move(residual), AdjointSolution(p.grid), j, Field()};
}

// Adjoint half: fills the first-order adjoint and the gradient.
void add_gradient(const AssimilationProblem& p, Evaluation& ev) {
  const AdjointForcing forcing = AdjointForcing::observations(p.observations.layout, ev.residual);
  ev.foa = p.kind == ControlKind::InitialCondition ? solve_foa_ic(ev.base, forcing) : solve_foa_bathy(ev.base, forcing);
  ev.gradient =
      p.kind == ControlKind::InitialCondition ? Field(-ev.foa.traj.eta.row(0).transpose()) : ev.foa.bathy_integral;
}

}  // namespace

Evaluation evaluate(const AssimilationProblem& p, const Control& c) {
  Evaluation ev = evaluate_cost(p, c);
  add_gradient(p, ev);
  return ev;
}

Field gradient_ic(const AssimilationProblem& p, const Control& c) {
  if (p.kind != ControlKind::InitialCondition) throw DomainError("gradient_ic on a bathymetry problem");
  return evaluate(p, c).gradient;
}

Field gradient_bathy(const AssimilationProblem& p, const Control& c) {
  if (p.kind != ControlKind::Bathymetry) throw DomainError("gradient_bathy on an initial-condition problem");
  return evaluate(p, c).gradient;
}

Field gradient(const AssimilationProblem& p, const Control& c) { return evaluate(p, c).gradient; }

std::vector<double> kappa_first_order(const AssimilationProblem& p, const Control& c, const Field& direction,
                                      const std::vector<double>& epsilons) {
  const Evaluation ev = evaluate(p, c);
  const double slope = inner_l2_space(ev.gradient, direction, p.grid);
  if (!(std::abs(slope) > 1e-300)) throw DegenerateDirectionError("kappa: direction is orthogonal to the gradient");
  std::vector<double> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    const Control shifted{c.kind, c.field + eps * direction};
    out.push_back((cost(p, shifted) - ev.cost) / (eps * slope));
  }
  return out;
}

DescentReport descend(const AssimilationProblem& p, const DescentOptions& options) {
  const Grid& grid = p.grid;
  DescentReport report;
  Control c = p.first_guess;
  Evaluation ev = evaluate(p, c);
  double gnorm = norm_l2_space(ev.gradient, grid);
  report.tolerance = options.abs_tol > 0.0 ? options.abs_tol : options.rel_tol * gnorm;
  report.iterates.push_back({0, ev.cost, gnorm, 0.0});
  report.final_control = c;
  if (gnorm <= report.tolerance) {
    report.converged = true;
    return report;
  }

  // Curvature probe along -g: a secant step of RMS size probe_size.
  double alpha;
  {
    const double rms_c = std::sqrt(c.field.square().mean());
    const double rms_g = std::sqrt(ev.gradient.square().mean());
    const double size = options.probe_size * (rms_c > 0.0 ? rms_c : 1.0);
    const double tau = size / rms_g;
    const Field s = -tau * ev.gradient;
    const Field y = gradient(p, Control{c.kind, c.field + s}) - ev.gradient;
    const double sy = inner_l2_space(s, y, grid);
    alpha = sy > 0.0 ? inner_l2_space(s, s, grid) / sy : tau;
  }

  for (Index it = 1; it <= options.max_iters; ++it) {
    const double g2 = gnorm * gnorm;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
      const Control trial{c.kind, c.field - alpha * ev.gradient};
      try {
        // The adjoint runs only for steps that pass on cost or need a slope test.
        Evaluation next = evaluate_cost(p, trial);
        const bool sufficient = next.cost < ev.cost && next.cost <= ev.cost - options.armijo_c1 * alpha * g2;
        const bool in_band = options.flat_cost_tol > 0.0 &&
                             std::abs(next.cost - ev.cost) <= options.flat_cost_tol * std::abs(ev.cost);
        if (!sufficient && !in_band) continue;
        add_gradient(p, next);
        // Approximate Armijo condition along d = -g: the slope at the trial
        // point has not overshot past the mirror of the starting slope.
        const bool flat = in_band && inner_l2_space(next.gradient, ev.gradient, grid) >= (2.0 * options.armijo_c1 - 1.0) * g2;
        if (sufficient || flat) {
          const Field s = trial.field - c.field;
          const Field y = next.gradient - ev.gradient;
          const double sy = inner_l2_space(s, y, grid);
          const double step = alpha;
          alpha = sy > 0.0 ? inner_l2_space(s, s, grid) / sy : 2.0 * alpha;
          c = trial;
          ev = std::move(next);
          gnorm = norm_l2_space(ev.gradient, grid);
          report.iterates.push_back({it, ev.cost, gnorm, step});
          accepted = true;
          break;
        }
      } catch (const SolverError&) {
        // Trial left the admissible region; shorten the step.
      }
    }
    report.final_control = c;
    if (!accepted) {
      throw StallError("line search failed after " + std::to_string(options.max_halvings) + " halvings at iteration " +
                           std::to_string(it),
                       report);
    }
    if (gnorm <= report.tolerance) {
      report.converged = true;
      break;
    }
  }
  return report;
}

AssimilationProblem make_twin(const Grid& grid, const Control& truth, const Field& known_counterpart,
                              const ObservationLayout& layout, double noise_sd, std::uint64_t seed,
                              const Field& first_guess) {
  if (!(noise_sd >= 0.0)) throw DomainError("noise standard deviation must be non-negative");
  const ForwardProblem fp = truth.kind == ControlKind::InitialCondition
                                ? ForwardProblem(grid, truth.field, known_counterpart)
                                : ForwardProblem(grid, known_counterpart, truth.field);
  ObsMatrix heights = observe(solve_forward(fp), layout);
  if (noise_sd > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd);
    for (Index k = 0; k < heights.cols(); ++k) {
      for (Index j = 0; j < heights.rows(); ++j) heights(j, k) += noise(rng);
    }
  }
  Field guess = first_guess.size() != 0 ? first_guess : Field(Field::Zero(grid.n_cells()));
  return AssimilationProblem(grid, truth.kind, known_counterpart, ObservationSet(layout, std::move(heights)),
                             Control{truth.kind, std::move(guess)});
}

AssimilationProblem make_twin(const Grid& grid, const Control& truth, const Field& known_counterpart,
                              const Eigen::VectorXd& stations, double noise_sd, std::uint64_t seed, Index stride,
                              const Field& first_guess) {
  return make_twin(grid, truth, known_counterpart, ObservationLayout::strided(grid, stations, stride), noise_sd, seed,
                   first_guess);
}

}  // namespace swe
