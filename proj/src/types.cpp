#include "swe/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swe/errors.hpp"

namespace swe {

Grid::Grid(double half_length, Index n_cells, double dt, Index n_steps, double c_cfl, double dissipation)
    : half_length_(half_length),
      n_cells_(n_cells),
      dx_(n_cells > 0 ? 2.0 * half_length / static_cast<double>(n_cells) : 0.0),
      dt_(dt),
      n_steps_(n_steps),
      c_cfl_(c_cfl),
      dissipation_(dissipation) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) throw DomainError("grid: half_length must be positive");
  if (n_cells < 8) throw DomainError("grid: n_cells must be at least 8");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("grid: dt must be positive");
  if (n_steps < 1) throw DomainError("grid: n_steps must be positive");
  if (!(c_cfl > 0.0) || c_cfl > 0.9) throw DomainError("grid: c_cfl must lie in (0, 0.9]");
  if (dt > c_cfl * dx_ * (1.0 + 1e-12)) {
    throw DomainError("grid: dt = " + std::to_string(dt) + " exceeds c_cfl * dx = " + std::to_string(c_cfl * dx_));
  }
  if (!(dissipation >= 0.0) || !std::isfinite(dissipation)) throw DomainError("grid: dissipation must be >= 0");
}

Grid Grid::with_courant(double half_length, Index n_cells, double horizon, double courant, double c_cfl,
                        double dissipation) {
  if (!(horizon > 0.0) || !(courant > 0.0)) throw DomainError("grid: horizon and courant must be positive");
  const double dx = 2.0 * half_length / static_cast<double>(n_cells);
  const auto n_steps = static_cast<Index>(std::ceil(horizon / (courant * dx) - 1e-9));
  return Grid(half_length, n_cells, horizon / static_cast<double>(n_steps), n_steps, c_cfl, dissipation);
}

double Grid::dissipation_coefficient() const { return dissipation_ * dx_ * dx_ * dx_ * dx_ / dt_; }

Field Grid::centers() const {
  Field x(n_cells_);
  for (Index i = 0; i < n_cells_; ++i) x(i) = this->x(i);
  return x;
}

Eigen::ArrayXd Grid::level_weights() const {
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(n_levels(), dt_);
  w(0) *= 0.5;
  w(n_steps_) *= 0.5;
  return w;
}

bool Grid::same_as(const Grid& other) const {
  return n_cells_ == other.n_cells_ && n_steps_ == other.n_steps_ && half_length_ == other.half_length_ &&
         dt_ == other.dt_ && dissipation_ == other.dissipation_;
}

StateTrajectory::StateTrajectory(const Grid& g)
    : grid(g), eta(Levels::Zero(g.n_levels(), g.n_cells())), u(Levels::Zero(g.n_levels(), g.n_cells())) {}

State StateTrajectory::level(Index n) const {
  State s(grid.n_cells(), 2);
  s.col(0) = eta.row(n).transpose();
  s.col(1) = u.row(n).transpose();
  return s;
}

void StateTrajectory::set_level(Index n, const State& s) {
  eta.row(n) = s.col(0).transpose();
  u.row(n) = s.col(1).transpose();
}

ObservationLayout::ObservationLayout(const Grid& grid, Eigen::VectorXd positions, const std::vector<double>& times)
    : positions_(std::move(positions)), dt_(grid.dt()) {
  levels_.reserve(times.size());
  for (double t : times) {
    const double s = t / grid.dt();
    const double r = std::round(s);
    if (!std::isfinite(t) || std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)) || r < 0 ||
        r > static_cast<double>(grid.n_steps())) {
      throw AlignmentError("observation time " + std::to_string(t) + " is not a solver time level");
    }
    levels_.push_back(static_cast<Index>(r));
  }
  finish(grid);
}

ObservationLayout ObservationLayout::strided(const Grid& grid, Eigen::VectorXd positions, Index stride) {
  if (stride < 1) throw DomainError("observation stride must be positive");
  ObservationLayout layout;
  layout.positions_ = std::move(positions);
  layout.dt_ = grid.dt();
  for (Index n = 0; n <= grid.n_steps(); n += stride) layout.levels_.push_back(n);
  layout.finish(grid);
  return layout;
}

void ObservationLayout::finish(const Grid& grid) {
  const double L = grid.half_length();
  if (positions_.size() == 0) throw DomainError("observation layout needs at least one station");
  for (Index j = 0; j < positions_.size(); ++j) {
    const double x = positions_(j);
    if (!std::isfinite(x) || x < -L || x >= L) {
      throw DomainError("station position " + std::to_string(x) + " outside [-L, L)");
    }
    if (j > 0 && !(x > positions_(j - 1))) throw DomainError("station positions must be strictly increasing");
  }
  if (levels_.size() < 2) throw DomainError("observation layout needs at least two sample times");
  for (std::size_t k = 1; k < levels_.size(); ++k) {
    if (levels_[k] <= levels_[k - 1]) throw DomainError("observation times must be strictly increasing");
  }
  const Index m = n_times();
  weights_ = Eigen::ArrayXd::Zero(m);
  for (Index k = 0; k + 1 < m; ++k) {
    const double half = 0.5 * dt_ * static_cast<double>(levels_[k + 1] - levels_[k]);
    weights_(k) += half;
    weights_(k + 1) += half;
  }
}

std::vector<double> ObservationLayout::times() const {
  std::vector<double> t;
  t.reserve(levels_.size());
  for (Index n : levels_) t.push_back(dt_ * static_cast<double>(n));
  return t;
}

ObservationSet::ObservationSet(ObservationLayout l, ObsMatrix h) : layout(std::move(l)), heights(std::move(h)) {
  if (heights.rows() != layout.n_obs() || heights.cols() != layout.n_times()) {
    throw AlignmentError("observation heights do not match the layout shape");
  }
  if (!heights.allFinite()) throw DomainError("observation heights must be finite");
}

const char* to_string(ControlKind kind) {
  return kind == ControlKind::InitialCondition ? "ic" : "bathymetry";
}

}  // namespace swe
