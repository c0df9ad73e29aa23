#pragma once

#include <cstdint>
#include <random>

#include "swe/observation.hpp"
#include "swe/recipes.hpp"
#include "swe/sensitivity.hpp"

namespace swe::testing {

inline Grid small_grid(Index n = 64, double horizon = 1.0) { return Grid::with_courant(1.0, n, horizon, 0.4, 0.9); }

/// Stations alternating between even and odd cells.
inline Eigen::VectorXd staggered_stations(const Grid& g, Index count) {
  Eigen::VectorXd x(count);
  const Index n = g.n_cells();
  for (Index j = 0; j < count; ++j) x[j] = g.x(((2 * j + 1) * n / (2 * count) + (j % 2)) % n);
  return x;
}

inline Field random_field(const Grid& g, std::uint64_t seed, double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, amplitude);
  return Field::NullaryExpr(g.n_cells(), [&] { return normal(rng); });
}

inline Field smooth_field(const Grid& g, std::uint64_t seed, double amplitude = 1.0) {
  return recipes::cosine_pack(g, 1, 8, seed, amplitude);
}

inline Control ic_truth(const Grid& g) { return {ControlKind::InitialCondition, recipes::gaussian(g, 0.05, 0.0, 0.25)}; }
inline Control bathy_truth(const Grid& g) { return {ControlKind::Bathymetry, recipes::sandbar(g, 0.1, 0.0, 0.25)}; }
inline Field bathy_known(const Grid& g) { return recipes::cosine_pack(g, 1, 6, 3, 0.05); }

inline AssimilationProblem ic_problem(const Grid& g, Index stations = 8, Index stride = 1) {
  return make_twin(g, ic_truth(g), Field::Zero(g.n_cells()), staggered_stations(g, stations), 0.0, 1, stride);
}

inline AssimilationProblem bathy_problem(const Grid& g, Index stations = 8, Index stride = 1) {
  return make_twin(g, bathy_truth(g), bathy_known(g), staggered_stations(g, stations), 0.0, 1, stride);
}

inline AssimilationProblem problem_of(ControlKind kind, const Grid& g, Index stations = 8) {
  return kind == ControlKind::InitialCondition ? ic_problem(g, stations) : bathy_problem(g, stations);
}

inline double rel_l2(const Field& a, const Field& b) {
  return std::sqrt((a - b).square().sum()) / std::sqrt(b.square().sum());
}

}  // namespace swe::testing
