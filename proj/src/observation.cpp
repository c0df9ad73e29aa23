#include "swe/observation.hpp"

#include <cmath>
#include <string>

#include "swe/errors.hpp"

namespace swe {

namespace {

void check_layout(const Grid& grid, const ObservationLayout& layout) {
  if (layout.dt() != grid.dt() || layout.levels().back() > grid.n_steps()) {
    throw AlignmentError("observation layout does not match the trajectory time levels");
  }
}

}  // namespace

Stencil interpolation_stencil(const Grid& grid, double x) {
  const double L = grid.half_length();
  if (!std::isfinite(x) || x < -L || x >= L) {
    throw DomainError("position " + std::to_string(x) + " outside [-L, L)");
  }
  const Index n = grid.n_cells();
  const double s = (x - grid.x(0)) / grid.dx();
  const double base = std::floor(s);
  const double frac = s - base;
  const Index left = ((static_cast<Index>(base) % n) + n) % n;
  return {left, (left + 1) % n, 1.0 - frac, frac};
}

ObsMatrix observe(const Levels& eta, const Grid& grid, const ObservationLayout& layout) {
  check_layout(grid, layout);
  if (eta.rows() != grid.n_levels() || eta.cols() != grid.n_cells()) {
    throw AlignmentError("observe: field shape does not match the grid");
  }
  const Index n_obs = layout.n_obs();
  ObsMatrix out(n_obs, layout.n_times());
  for (Index j = 0; j < n_obs; ++j) {
    const Stencil st = interpolation_stencil(grid, layout.positions()(j));
    for (Index k = 0; k < layout.n_times(); ++k) {
      const Index n = layout.levels()[static_cast<std::size_t>(k)];
      out(j, k) = st.w_left * eta(n, st.left) + st.w_right * eta(n, st.right);
    }
  }
  return out;
}

ObsMatrix observe(const StateTrajectory& traj, const ObservationLayout& layout) {
  return observe(traj.eta, traj.grid, layout);
}

Levels inject(const ObsMatrix& residual, const ObservationLayout& layout, const Grid& grid) {
  check_layout(grid, layout);
  if (residual.rows() != layout.n_obs() || residual.cols() != layout.n_times()) {
    throw AlignmentError("inject: residual shape does not match the observation layout");
  }
  Levels out = Levels::Zero(grid.n_levels(), grid.n_cells());
  const Eigen::ArrayXd level_w = grid.level_weights();
  for (Index j = 0; j < layout.n_obs(); ++j) {
    const Stencil st = interpolation_stencil(grid, layout.positions()(j));
    for (Index k = 0; k < layout.n_times(); ++k) {
      const Index n = layout.levels()[static_cast<std::size_t>(k)];
      const double scale = layout.time_weights()(k) / (level_w(n) * grid.dx());
      out(n, st.left) += scale * st.w_left * residual(j, k);
      out(n, st.right) += scale * st.w_right * residual(j, k);
    }
  }
  return out;
}

double inner_l2_space(const Field& a, const Field& b, const Grid& grid) {
  if (a.size() != grid.n_cells() || b.size() != grid.n_cells()) {
    throw AlignmentError("inner_l2_space: length mismatch");
  }
  return (a * b).sum() * grid.dx();
}

double norm_l2_space(const Field& a, const Grid& grid) { return std::sqrt(inner_l2_space(a, a, grid)); }

double inner_l2_spacetime(const Levels& a, const Levels& b, const Grid& grid) {
  if (a.rows() != grid.n_levels() || b.rows() != grid.n_levels() || a.cols() != grid.n_cells() ||
      b.cols() != grid.n_cells()) {
    throw AlignmentError("inner_l2_spacetime: shape mismatch");
  }
  const Eigen::ArrayXd w = grid.level_weights();
  double total = 0.0;
  for (Index n = 0; n < a.rows(); ++n) total += w(n) * (a.row(n) * b.row(n)).sum();
  return total * grid.dx();
}

double inner_obs(const ObsMatrix& a, const ObsMatrix& b, const ObservationLayout& layout) {
  if (a.rows() != layout.n_obs() || b.rows() != layout.n_obs() || a.cols() != layout.n_times() ||
      b.cols() != layout.n_times()) {
    throw AlignmentError("inner_obs: shape mismatch");
  }
  return ((a.array() * b.array()).colwise().sum().transpose() * layout.time_weights()).sum();
}

}  // namespace swe
