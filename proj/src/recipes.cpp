#include "swe/recipes.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "swe/errors.hpp"

namespace swe::recipes {

namespace {

double periodic_distance(double x, double center, double L) {
  double d = std::fmod(x - center + L, 2.0 * L);
  if (d < 0.0) d += 2.0 * L;
  return d - L;
}

Field bump(const Grid& grid, double amplitude, double center, double width) {
  if (!(width > 0.0)) throw DomainError("recipe width must be positive");
  Field f(grid.n_cells());
  for (Index i = 0; i < f.size(); ++i) {
    const double d = periodic_distance(grid.x(i), center, grid.half_length()) / width;
    f[i] = amplitude * std::exp(-d * d);
  }
  return f;
}

}  // namespace

Field gaussian(const Grid& grid, double amplitude, double center, double width) {
  return bump(grid, amplitude, center, width);
}

Field sandbar(const Grid& grid, double height, double center, double width) {
  if (height >= 1.0) throw DomainError("sandbar height must stay below the still-water depth 1");
  return bump(grid, height, center, width);
}

Field cosine_pack(const Grid& grid, int k_min, int k_max, std::uint64_t seed, double amplitude) {
  if (k_min < 1 || k_max < k_min) throw DomainError("cosine_pack needs 1 <= k_min <= k_max");
  if (2 * k_max >= grid.n_cells()) throw DomainError("cosine_pack: k_max is not resolved by the grid");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> weight(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double L = grid.half_length();
  const Field x = grid.centers();
  Field f = Field::Zero(grid.n_cells());
  for (int k = k_min; k <= k_max; ++k) {
    const double a = weight(rng);
    const double p = phase(rng);
    f += a * (k * std::numbers::pi / L * x + p).cos();
  }
  const double peak = f.abs().maxCoeff();
  if (peak == 0.0) throw DomainError("cosine_pack produced a zero field");
  return f * (amplitude / peak);
}

double min_wavelength(const Grid& grid, int k_max) { return 2.0 * grid.half_length() / k_max; }

}  // namespace swe::recipes
