#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "swe/hessian.hpp"

namespace swe {

/// Partial derivatives of a response as Riesz representers: `d_eta` / `d_u`
/// in the space-time product, `d_control` in the spatial product.
struct ResponsePartials {
  Levels d_eta;
  Levels d_u;
  Field d_control;
};

/// Scalar functional G(eta, u, control) of an assimilation outcome.
struct ResponseFunction {
  std::string name;
  std::function<double(const StateTrajectory&, const Control&)> evaluate;
  std::function<ResponsePartials(const StateTrajectory&, const Control&)> partials;
};

namespace responses {

/// G = 0.
ResponseFunction zero();
/// 1/2 |c - c_true|^2
ResponseFunction control_error(const Field& truth);
/// eta(x0, T) by linear interpolation.
ResponseFunction point_height(double x0);
/// 1/2 int (eta^2 + (1 + eta) u^2) dx at t = T.
ResponseFunction terminal_energy();
/// a * G1 + G2
ResponseFunction combine(double a, const ResponseFunction& g1, const ResponseFunction& g2);

}  // namespace responses

/// Names accepted by `make_response`: zero, control_error, point_height, terminal_energy.
std::vector<std::string> builtin_responses();

/// `x0` is used by point_height, `truth` by control_error.
ResponseFunction make_response(const std::string& name, double x0, const Field& truth);

/// Largest relative mismatch between central differences of `evaluate` and the
/// supplied partials over `trials` random directions in (eta, u, control).
double response_fd_check(const ResponseFunction& rf, const StateTrajectory& traj, const Control& c, int trials,
                         std::uint64_t seed, double eps = 1e-6);

/// F = dG/dphi + psi(x, 0) from the forced first-order adjoint.
Field assemble_F_ic(const StateTrajectory& base, const Control& c, const ResponseFunction& rf,
                    ForcedSign sign = ForcedSign::Consistent);

/// F = dG/dlambda - int_0^T u d(gamma)/dx dt from the forced first-order adjoint.
Field assemble_F_bathy(const StateTrajectory& base, const Control& c, const ResponseFunction& rf);

struct SensitivityOptions {
  double cg_rel_tol = 1e-8;
  Index cg_max_iter = 500;
  double tikhonov = 0.0;
  ForcedSign sign = ForcedSign::Consistent;
  /// Optimality precondition: |grad J(c)| <= optimality_factor * reference_gradient_norm.
  double optimality_factor = 1e-6;
  /// |grad J(first guess)| when not positive.
  double reference_gradient_norm = 0.0;
};

/// dG/dm per (station, sample). Values are representers in the weighted
/// observation product: the plain partial derivative with respect to one
/// observation equals dG_dm(j, k) times the sample's time weight.
struct SensitivityResult {
  ObsMatrix dG_dm;
  Field nu;
  Field F;
  CgResult cg;
  std::string point_hash;
  std::string config_hash;
};

/// F assembly, H nu = F by conjugate gradients, tangent solve started from nu,
/// and observation of the tangent heights.
SensitivityResult sensitivity_ic(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                                 const SensitivityOptions& options = {});

/// Bathymetry analogue: the tangent is driven by nu as a bathymetry perturbation.
SensitivityResult sensitivity_bathy(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                                    const SensitivityOptions& options = {});

SensitivityResult sensitivity(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                              const SensitivityOptions& options = {});

struct OracleOptions {
  double delta = 1e-4;
  /// Re-optimisation stops at |grad J| <= rel_tol * |grad J(first guess)|.
  double rel_tol = 1e-9;
  Index max_iters = 5000;
  /// Round-off band for the re-optimisation line search, see DescentOptions.
  double flat_cost_tol = 1e-12;
  int threads = 1;
  /// (station, sample) pairs to evaluate; all samples when empty.
  std::vector<std::pair<Index, Index>> samples;
};

/// Brute-force dG/dm: for each sample perturb the observation by +-delta,
/// re-optimise from `optimum` and difference G. Divided by the sample time
/// weight so the result is comparable with SensitivityResult::dG_dm. Entries
/// not requested are NaN. Throws OracleError naming the failing sample.
ObsMatrix oracle_sensitivity(const AssimilationProblem& p, const Control& optimum, const ResponseFunction& rf,
                             const OracleOptions& options = {});

}  // namespace swe
