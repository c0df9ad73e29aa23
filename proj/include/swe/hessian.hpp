#pragma once

#include <cstdint>
#include <vector>

#include "swe/assimilate.hpp"

namespace swe {

/// Matrix-free Hessian of the misfit cost at a fixed linearisation point.
///
/// The forward trajectory and first-order adjoint are computed once at
/// construction; every product reuses them. `apply` adds the Tikhonov shift
/// mu * v, `hvp` does not. Safe to use from several threads.
class HessianOperator {
 public:
  HessianOperator(const AssimilationProblem& problem, const Control& at, double tikhonov = 0.0);

  const AssimilationProblem& problem() const { return problem_; }
  const Control& point() const { return point_; }
  const Evaluation& evaluation() const { return eval_; }
  double tikhonov() const { return mu_; }

  Field hvp(const Field& v) const;
  Field apply(const Field& v) const { return mu_ == 0.0 ? hvp(v) : Field(hvp(v) + mu_ * v); }

 private:
  AssimilationProblem problem_;
  Control point_;
  Evaluation eval_;
  double mu_;
};

/// -eta_bar(x, 0) from the tangent and second-order adjoint solves.
Field hvp_ic(const HessianOperator& op, const Field& eta_dd);
/// int_0^T (u_hat d(eta*)/dx + u d(eta_bar)/dx) dt
Field hvp_bathy(const HessianOperator& op, const Field& beta_hat);

/// kappa(eps) = [J'(c + eps d2; d1) - J'(c; d1)] / (eps <H d2, d1>).
std::vector<double> kappa_second_order(const HessianOperator& op, const Field& eta_p, const Field& eta_dd,
                                       const std::vector<double>& epsilons);

/// max over random pairs of |<Hu, v> - <u, Hv>| / (|Hu| |v|).
double symmetry_check(const HessianOperator& op, int trials, std::uint64_t seed, int threads = 1);

struct CgResult {
  Field solution;
  /// |H nu - F|_2 before the first and after every iteration.
  std::vector<double> residual_history;
  Index iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients on op.apply(nu) = F until |residual|_2 <= rel_tol |F|_2.
///
/// Throws NotPositiveDefiniteError on a search direction with non-positive
/// curvature and CgNonConvergenceError when max_iter is reached.
CgResult solve_hnu_f(const HessianOperator& op, const Field& F, double rel_tol = 1e-8, Index max_iter = 500);

}  // namespace swe
