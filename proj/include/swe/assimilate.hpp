#pragma once

#include <cstdint>
#include <vector>

#include "swe/adjoint.hpp"
#include "swe/errors.hpp"
#include "swe/swe_solver.hpp"
#include "swe/types.hpp"

namespace swe {

/// Reconstruct one control (initial height or bathymetry) from height
/// observations; the other field is known.
struct AssimilationProblem {
  Grid grid;
  ControlKind kind;
  /// Bathymetry for the IC kind, initial height for the bathymetry kind.
  Field known;
  ObservationSet observations;
  Control first_guess;

  AssimilationProblem(const Grid& g, ControlKind k, Field known_counterpart, ObservationSet obs, Control guess);

  ForwardProblem forward_problem(const Control& c) const;
};

/// J = 1/2 sum_k w_k sum_j (eta(x_j, t_k) - y_jk)^2 with trapezoidal weights w_k.
double cost(const AssimilationProblem& p, const Control& c);

/// Everything one cost/gradient evaluation produces.
struct Evaluation {
  StateTrajectory base;
  ObsMatrix residual;
  AdjointSolution foa;
  double cost;
  Field gradient;
};

Evaluation evaluate(const AssimilationProblem& p, const Control& c);

/// -eta*(x, 0)
Field gradient_ic(const AssimilationProblem& p, const Control& c);
/// int_0^T u d(eta*)/dx dt
Field gradient_bathy(const AssimilationProblem& p, const Control& c);
Field gradient(const AssimilationProblem& p, const Control& c);

/// First-order kappa sweep: [J(c + eps d) - J(c)] / (eps <grad J, d>).
std::vector<double> kappa_first_order(const AssimilationProblem& p, const Control& c, const Field& direction,
                                      const std::vector<double>& epsilons);

struct DescentOptions {
  Index max_iters = 200;
  /// Stop when |grad J| <= rel_tol * |grad J(first guess)|; abs_tol overrides when positive.
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  double armijo_c1 = 1e-4;
  int max_halvings = 40;
  /// Cost changes below this fraction of the cost count as round-off. Steps
  /// in that band are accepted on the slope form of the Armijo condition, so
  /// the cost may rise by at most that fraction. Zero (the default) keeps the
  /// cost sequence non-increasing.
  double flat_cost_tol = 0.0;
  /// RMS size of the curvature probe relative to the control RMS (or absolute when the control is zero).
  double probe_size = 1e-3;
};

struct DescentIterate {
  Index iteration;
  double cost;
  double grad_norm;
  double step;
};

struct DescentReport {
  std::vector<DescentIterate> iterates;
  Control final_control;
  bool converged = false;
  double tolerance = 0.0;
};

class StallError : public Error {
 public:
  StallError(const std::string& what, DescentReport report) : Error(what), report_(std::move(report)) {}
  const DescentReport& report() const { return report_; }

 private:
  DescentReport report_;
};

/// Steepest descent with Armijo backtracking, started from p.first_guess.
///
/// The first trial step comes from a curvature probe along -grad J; later
/// trial steps use the ratio <s, s> / <s, y> of the last accepted step s and
/// gradient change y. Throws StallError after `max_halvings` rejected trials.
DescentReport descend(const AssimilationProblem& p, const DescentOptions& options = {});

/// Twin experiment: runs the truth forward, samples every `stride`-th level at
/// the stations and adds Gaussian noise. The first guess defaults to zero.
AssimilationProblem make_twin(const Grid& grid, const Control& truth, const Field& known_counterpart,
                              const Eigen::VectorXd& stations, double noise_sd, std::uint64_t seed,
                              Index stride = 1, const Field& first_guess = Field());

/// Same, with an explicit observation layout.
AssimilationProblem make_twin(const Grid& grid, const Control& truth, const Field& known_counterpart,
                              const ObservationLayout& layout, double noise_sd, std::uint64_t seed,
                              const Field& first_guess = Field());

}  // namespace swe
