#pragma once

#include <Eigen/Dense>

#include <vector>

namespace swe {

using Index = Eigen::Index;

/// Cell-centred samples of a function of x.
template <typename Scalar>
using FieldT = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Two-component state (column 0 = height perturbation, column 1 = velocity).
template <typename Scalar>
using StateT = Eigen::Array<Scalar, Eigen::Dynamic, 2>;

/// Space-time record: one row per time level, one column per cell.
template <typename Scalar>
using LevelsT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Field = FieldT<double>;
using State = StateT<double>;
using Levels = LevelsT<double>;

/// Observation-space array, N_obs rows by n_times columns.
using ObsMatrix = Eigen::MatrixXd;

/// Uniform periodic cell-centred mesh on [-L, L] plus time stepping metadata.
///
/// The fourth-difference dissipation coefficient is `dissipation * dx^4 / dt`,
/// so the damping applied to the grid-scale mode per step does not depend on
/// the resolution.
class Grid {
 public:
  Grid(double half_length, Index n_cells, double dt, Index n_steps, double c_cfl = 0.5,
       double dissipation = 1e-3);

  /// Picks the smallest step count with dt <= courant * dx that lands exactly on `horizon`.
  static Grid with_courant(double half_length, Index n_cells, double horizon, double courant,
                           double c_cfl = 0.5, double dissipation = 1e-3);

  double half_length() const { return half_length_; }
  Index n_cells() const { return n_cells_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  Index n_steps() const { return n_steps_; }
  Index n_levels() const { return n_steps_ + 1; }
  double horizon() const { return dt_ * static_cast<double>(n_steps_); }
  double c_cfl() const { return c_cfl_; }
  double dissipation() const { return dissipation_; }
  double dissipation_coefficient() const;

  double x(Index i) const { return -half_length_ + (static_cast<double>(i) + 0.5) * dx_; }
  Field centers() const;
  double time(Index level) const { return dt_ * static_cast<double>(level); }

  /// Trapezoidal weights over all time levels (dt/2 at both ends).
  Eigen::ArrayXd level_weights() const;

  bool same_as(const Grid& other) const;

 private:
  double half_length_;
  Index n_cells_;
  double dx_;
  double dt_;
  Index n_steps_;
  double c_cfl_;
  double dissipation_;
};

/// Full space-time record of (eta, u) from a forward, tangent or adjoint solve.
///
/// `beta` holds the bathymetry the record was computed over; it is empty for
/// adjoint records. Forward solves also keep the two intermediate Runge-Kutta
/// stages of every step in `stages` (row n: eta1, u1, eta2, u2) so linearised
/// and adjoint sweeps need not recompute them.
struct StateTrajectory {
  Grid grid;
  Levels eta;
  Levels u;
  Field beta;
  Levels stages;

  explicit StateTrajectory(const Grid& g);

  State level(Index n) const;
  void set_level(Index n, const State& s);
};

/// Station positions and sample levels; the heights live in ObservationSet.
class ObservationLayout {
 public:
  ObservationLayout(const Grid& grid, Eigen::VectorXd positions, const std::vector<double>& times);
  /// Every `stride`-th solver level starting at level 0.
  static ObservationLayout strided(const Grid& grid, Eigen::VectorXd positions, Index stride);

  const Eigen::VectorXd& positions() const { return positions_; }
  const std::vector<Index>& levels() const { return levels_; }
  std::vector<double> times() const;
  Index n_obs() const { return positions_.size(); }
  Index n_times() const { return static_cast<Index>(levels_.size()); }

  /// Trapezoidal quadrature weights over the sample times.
  const Eigen::ArrayXd& time_weights() const { return weights_; }

  double dt() const { return dt_; }

 private:
  ObservationLayout() = default;
  void finish(const Grid& grid);

  Eigen::VectorXd positions_;
  std::vector<Index> levels_;
  Eigen::ArrayXd weights_;
  double dt_ = 0.0;
};

struct ObservationSet {
  ObservationLayout layout;
  ObsMatrix heights;

  ObservationSet(ObservationLayout l, ObsMatrix h);
};

enum class ControlKind { InitialCondition, Bathymetry };

const char* to_string(ControlKind kind);

struct Control {
  ControlKind kind;
  Field field;
};

}  // namespace swe
