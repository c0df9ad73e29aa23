#include "swe/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "swe/observation.hpp"
#include "swe/parallel.hpp"

namespace swe {

HessianOperator::HessianOperator(const AssimilationProblem& problem, const Control& at, double tikhonov)
    : problem_(problem), point_(at), eval_(evaluate(problem, at)), mu_(tikhonov) {
  if (!(tikhonov >= 0.0)) throw DomainError("Tikhonov shift must be non-negative");
}

Field HessianOperator::hvp(const Field& v) const {
  return problem_.kind == ControlKind::InitialCondition ? hvp_ic(*this, v) : hvp_bathy(*this, v);
}

Field hvp_ic(const HessianOperator& op, const Field& eta_dd) {
  if (op.problem().kind != ControlKind::InitialCondition) throw DomainError("hvp_ic on a bathymetry problem");
  const Evaluation& ev = op.evaluation();
  const StateTrajectory tangent = solve_tangent_ic(ev.base, eta_dd);
  const AdjointSolution soa = solve_soa_ic(ev.base, ev.foa, tangent, op.problem().observations.layout);
  return -soa.traj.eta.row(0).transpose();
}

Field hvp_bathy(const HessianOperator& op, const Field& beta_hat) {
  if (op.problem().kind != ControlKind::Bathymetry) throw DomainError("hvp_bathy on an initial-condition problem");
  const Evaluation& ev = op.evaluation();
  const StateTrajectory tangent = solve_tangent_bathy(ev.base, beta_hat);
  const AdjointSolution soa = solve_soa_bathy(ev.base, ev.foa, tangent, beta_hat, op.problem().observations.layout);
  return soa.bathy_integral;
}

std::vector<double> kappa_second_order(const HessianOperator& op, const Field& eta_p, const Field& eta_dd,
                                       const std::vector<double>& epsilons) {
  const Grid& grid = op.problem().grid;
  const double denom_unit = inner_l2_space(op.hvp(eta_dd), eta_p, grid);
  if (!(std::abs(denom_unit) > 1e-14)) {
    throw DegenerateDirectionError("kappa: directions are H-orthogonal (|<H d2, d1>| = " +
                                   std::to_string(std::abs(denom_unit)) + ")");
  }
  const Control& c = op.point();
  const double slope0 = inner_l2_space(op.evaluation().gradient, eta_p, grid);
  std::vector<double> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    const Field g = gradient(op.problem(), Control{c.kind, c.field + eps * eta_dd});
    out.push_back((inner_l2_space(g, eta_p, grid) - slope0) / (eps * denom_unit));
  }
  return out;
}

double symmetry_check(const HessianOperator& op, int trials, std::uint64_t seed, int threads) {
  if (trials < 1) throw DomainError("symmetry_check needs at least one trial");
  const Grid& grid = op.problem().grid;
  const Index n = grid.n_cells();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Field> us, vs;
  for (int t = 0; t < trials; ++t) {
    Field u(n), v(n);
    for (Index i = 0; i < n; ++i) u[i] = normal(rng);
    for (Index i = 0; i < n; ++i) v[i] = normal(rng);
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
  }
  std::vector<double> asym(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](Index t) {
    const Field hu = op.hvp(us[t]);
    const Field hv = op.hvp(vs[t]);
    const double a = inner_l2_space(hu, vs[t], grid);
    const double b = inner_l2_space(us[t], hv, grid);
    asym[static_cast<std::size_t>(t)] = std::abs(a - b) / (norm_l2_space(hu, grid) * norm_l2_space(vs[t], grid));
  });
  return *std::max_element(asym.begin(), asym.end());
}

CgResult solve_hnu_f(const HessianOperator& op, const Field& F, double rel_tol, Index max_iter) {
  const Index n = op.problem().grid.n_cells();
  if (F.size() != n) throw AlignmentError("solve_hnu_f: right-hand side length mismatch");
  if (!F.allFinite()) throw DomainError("solve_hnu_f: right-hand side is not finite");
  CgResult res;
  res.solution = Field::Zero(n);
  const double fnorm = std::sqrt(F.square().sum());
  res.residual_history.push_back(fnorm);
  if (fnorm == 0.0) return res;

  Field r = F;
  Field p = r;
  double rr = r.square().sum();
  const double target = rel_tol * fnorm;
  for (Index it = 1; it <= max_iter; ++it) {
    const Field hp = op.apply(p);
    const double curvature = (p * hp).sum();
    if (!(curvature > 0.0)) {
      throw NotPositiveDefiniteError("conjugate gradients met non-positive curvature " + std::to_string(curvature) +
                                         " at iteration " + std::to_string(it),
                                     p, curvature);
    }
    const double a = rr / curvature;
    res.solution += a * p;
    r -= a * hp;
    const double rr_next = r.square().sum();
    res.residual_history.push_back(std::sqrt(rr_next));
    res.iterations = it;
    if (std::sqrt(rr_next) <= target) {
      res.relative_residual = std::sqrt(rr_next) / fnorm;
      return res;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  throw CgNonConvergenceError("conjugate gradients did not reach relative residual " + std::to_string(rel_tol) +
                                  " in " + std::to_string(max_iter) + " iterations",
                              res.residual_history);
}

}  // namespace swe
