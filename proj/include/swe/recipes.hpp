#pragma once

#include <cstdint>

#include "swe/types.hpp"

namespace swe::recipes {

/// amplitude * exp(-(d / width)^2) with d the periodic distance to `center`.
Field gaussian(const Grid& grid, double amplitude, double center, double width);

/// Sum of cosines with integer wavenumbers k in [k_min, k_max] (wavelength
/// 2L / k), random phases and unit-variance random weights drawn from `seed`,
/// scaled so the maximum magnitude equals `amplitude`.
Field cosine_pack(const Grid& grid, int k_min, int k_max, std::uint64_t seed, double amplitude = 1e-2);

/// Bathymetry bump: height * exp(-(d / width)^2), periodic distance d.
Field sandbar(const Grid& grid, double height, double center, double width);

/// Shortest wavelength present in a cosine pack.
double min_wavelength(const Grid& grid, int k_max);

}  // namespace swe::recipes
