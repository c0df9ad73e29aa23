#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "swe/errors.hpp"

using namespace swe;
using namespace swe::testing;

namespace {

double max_abs(const Levels& a) { return a.abs().maxCoeff(); }

double traj_norm(const StateTrajectory& t) { return std::sqrt(t.eta.square().sum() + t.u.square().sum()); }

// Standing wave of the linearised equations: eta = A cos(kx) cos(kt).
double linear_wave_error(Index n, double horizon) {
  const Grid g = Grid::with_courant(1.0, n, horizon, 0.4, 0.9);
  const double k = 2.0 * std::numbers::pi;
  const double amp = 1e-4;
  const Field phi = amp * (k * g.centers()).cos();
  const StateTrajectory t = solve_forward(ForwardProblem(g, phi, Field::Zero(n)));
  const Field exact = amp * (k * g.centers()).cos() * std::cos(k * g.horizon());
  const Field num = t.eta.row(g.n_steps()).transpose();
  return std::sqrt((num - exact).square().sum() / exact.square().sum());
}

}  // namespace

TEST_CASE("rest state stays at rest", "[solver]") {
  const Grid g = small_grid();
  const StateTrajectory t = solve_forward(ForwardProblem(g, Field::Zero(64), Field::Zero(64)));
  CHECK(max_abs(t.eta) == 0.0);
  CHECK(max_abs(t.u) == 0.0);
  CHECK(t.eta.rows() == g.n_levels());
}

TEST_CASE("initial velocity is zero and initial height is phi", "[solver]") {
  const Grid g = small_grid();
  const Field phi = recipes::gaussian(g, 0.05, 0.3, 0.2);
  const StateTrajectory t = solve_forward(ForwardProblem(g, phi, recipes::sandbar(g, 0.2, -0.4, 0.2)));
  CHECK(t.u.row(0).abs().maxCoeff() == 0.0);
  CHECK((t.eta.row(0).transpose() == phi).all());
  CHECK(t.u.row(g.n_steps()).abs().maxCoeff() > 1e-3);
}

TEST_CASE("small waves follow the linear wave equation", "[solver]") {
  CHECK(linear_wave_error(64, 1.0) <= 1e-2);
  CHECK(linear_wave_error(256, 1.0) <= 1e-2);
}

TEST_CASE("spatial refinement converges at second order or better", "[solver]") {
  const double e1 = linear_wave_error(32, 0.5);
  const double e2 = linear_wave_error(64, 0.5);
  const double e3 = linear_wave_error(128, 0.5);
  INFO("errors " << e1 << " " << e2 << " " << e3);
  CHECK(std::log2(e1 / e2) >= 1.8);
  CHECK(std::log2(e2 / e3) >= 1.8);
}

TEST_CASE("mass is conserved", "[solver]") {
  const Grid g = small_grid(128);
  const Field phi = recipes::gaussian(g, 0.05, -0.2, 0.2);
  const StateTrajectory t = solve_forward(ForwardProblem(g, phi, recipes::sandbar(g, 0.3, 0.4, 0.15)));
  const double m0 = phi.sum() * g.dx();
  CHECK(mass(t, 0) == Catch::Approx(m0).epsilon(1e-15));
  for (Index n = 0; n <= g.n_steps(); ++n) CHECK(std::abs(mass(t, n) - m0) <= 1e-10);

  const StateTrajectory rest = solve_forward(ForwardProblem(g, Field::Zero(128), Field::Zero(128)));
  CHECK(mass(rest, g.n_steps()) == 0.0);
  StateTrajectory scaled = t;
  scaled.eta *= 3.0;
  CHECK(mass(scaled, 7) == Catch::Approx(3.0 * mass(t, 7)).epsilon(1e-14));
}

TEST_CASE("forward solver errors", "[solver]") {
  const Grid g = small_grid();
  CHECK_THROWS_AS(ForwardProblem(g, Field::Zero(32), Field::Zero(64)), AlignmentError);
  CHECK_THROWS_AS(ForwardProblem(g, Field::Constant(64, -0.5), Field::Constant(64, 0.5)), DomainError);

  // A tall hump raises the wave speed above the CFL bound the grid allows.
  const Grid tight = Grid::with_courant(1.0, 64, 1.0, 0.4, 0.45);
  CHECK_NOTHROW(solve_forward(ForwardProblem(tight, recipes::gaussian(tight, 0.01, 0.0, 0.2), Field::Zero(64))));
  CHECK_THROWS_AS(solve_forward(ForwardProblem(tight, recipes::gaussian(tight, 0.5, 0.0, 0.2), Field::Zero(64))),
                  StabilityError);

  // A depression travelling onto a shallow bar runs dry.
  const Grid h = small_grid(128, 0.6);
  const Field phi = recipes::gaussian(h, -0.15, -0.3, 0.1);
  const Field beta = recipes::sandbar(h, 0.9, 0.1, 0.1);
  CHECK((1.0 + phi - beta).minCoeff() > 0.05);
  CHECK_THROWS_AS(solve_forward(ForwardProblem(h, phi, beta)), DryingError);
}

TEST_CASE("initial-condition tangent model", "[solver]") {
  const Grid g = small_grid();
  const Field phi = recipes::gaussian(g, 0.05, 0.0, 0.25);
  const ForwardProblem fp(g, phi, Field::Zero(64));
  const StateTrajectory base = solve_forward(fp);

  CHECK(traj_norm(solve_tangent_ic(base, Field::Zero(64))) == 0.0);

  const Field d = smooth_field(g, 4, 0.01);
  const StateTrajectory t1 = solve_tangent_ic(base, d);
  const StateTrajectory t3 = solve_tangent_ic(base, 3.0 * d);
  CHECK(max_abs(t3.eta - 3.0 * t1.eta) <= 1e-12 * max_abs(t1.eta));
  CHECK(max_abs(t3.u - 3.0 * t1.u) <= 1e-12 * max_abs(t1.u));

  auto remainder = [&](double eps) {
    const StateTrajectory pert = solve_forward(ForwardProblem(g, phi + eps * d, Field::Zero(64)));
    return std::sqrt((pert.eta - base.eta - eps * t1.eta).square().sum() +
                     (pert.u - base.u - eps * t1.u).square().sum());
  };
  const double r1 = remainder(1.0);
  const double r2 = remainder(0.5);
  const double r3 = remainder(0.25);
  INFO("remainders " << r1 << " " << r2 << " " << r3);
  CHECK(r1 / r2 == Catch::Approx(4.0).epsilon(0.05));
  CHECK(r2 / r3 == Catch::Approx(4.0).epsilon(0.05));
}

TEST_CASE("bathymetry tangent model", "[solver]") {
  const Grid g = small_grid();
  const Field phi = bathy_known(g);
  const Field beta = recipes::sandbar(g, 0.1, 0.0, 0.25);
  const StateTrajectory base = solve_forward(ForwardProblem(g, phi, beta));
  CHECK(traj_norm(solve_tangent_bathy(base, Field::Zero(64))) == 0.0);

  const Field d = smooth_field(g, 5, 0.01);
  const StateTrajectory t1 = solve_tangent_bathy(base, d);
  CHECK(t1.eta.row(0).abs().maxCoeff() == 0.0);
  CHECK(t1.u.row(0).abs().maxCoeff() == 0.0);
  const StateTrajectory t2 = solve_tangent_bathy(base, -2.0 * d);
  CHECK(max_abs(t2.eta + 2.0 * t1.eta) <= 1e-12 * max_abs(t1.eta));

  auto remainder = [&](double eps) {
    const StateTrajectory pert = solve_forward(ForwardProblem(g, phi, beta + eps * d));
    return std::sqrt((pert.eta - base.eta - eps * t1.eta).square().sum() +
                     (pert.u - base.u - eps * t1.u).square().sum());
  };
  const double r1 = remainder(1.0);
  const double r2 = remainder(0.5);
  const double r3 = remainder(0.25);
  INFO("remainders " << r1 << " " << r2 << " " << r3);
  CHECK(r1 / r2 == Catch::Approx(4.0).epsilon(0.05));
  CHECK(r2 / r3 == Catch::Approx(4.0).epsilon(0.05));
}

TEST_CASE("bathymetry perturbation outside the moving water has no effect", "[solver]") {
  const Grid g = small_grid(128, 0.25);
  const Field phi = recipes::gaussian(g, 0.05, -0.5, 0.08);
  const StateTrajectory base = solve_forward(ForwardProblem(g, phi, Field::Zero(128)));
  Field beta_hat = Field::Zero(128);
  Index lo = 0, hi = 0;
  for (Index i = 0; i < 128; ++i) {
    if (std::abs(g.x(i) - 0.5) < 0.1) {
      beta_hat(i) = 1.0;
      if (!lo) lo = i;
      hi = i;
    }
  }
  const double u_there = base.u.middleCols(lo, hi - lo + 1).abs().maxCoeff();
  INFO("max |u| on the support " << u_there);
  REQUIRE(u_there <= 1e-10);
  const StateTrajectory t = solve_tangent_bathy(base, beta_hat);
  CHECK(max_abs(t.eta) <= 1e-10);
  CHECK(max_abs(t.u) <= 1e-10);
}
