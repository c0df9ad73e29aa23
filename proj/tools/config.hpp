#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swe/sensitivity.hpp"

namespace swe::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Analytic field recipe: zero, gaussian, cosine_pack or sandbar plus its parameters.
struct RecipeSpec {
  std::string name = "zero";
  std::map<std::string, double> params;
};

struct RunConfig {
  // [grid]
  double half_length = 1.0;
  Index n_cells = 64;
  /// Either horizon + courant, or dt + n_steps.
  double horizon = 1.0;
  double courant = 0.4;
  double dt = 0.0;
  Index n_steps = 0;
  double c_cfl = 0.5;
  double dissipation = 1e-3;

  // [problem]
  ControlKind kind = ControlKind::InitialCondition;
  RecipeSpec truth;
  RecipeSpec known;
  RecipeSpec first_guess;

  // [observations]
  std::vector<double> stations;
  Index station_count = 0;
  std::string station_layout = "uniform";
  Index stride = 1;
  Index start_level = 0;
  double noise_sd = 0.0;
  std::uint64_t seed = 1;

  // [optimizer]
  DescentOptions optimizer;

  // [kappa]
  double eps_min = 1e-12;
  double eps_max = 1e-1;
  int eps_count = 23;
  std::uint64_t direction_seed = 7;
  int hvp_trials = 5;
  double hvp_eps = 1e-4;
  int symmetry_trials = 10;

  // [sensitivity]
  std::string response = "point_height";
  double x0 = 0.0;
  SensitivityOptions sensitivity;
  OracleOptions oracle;

  // [output]
  std::string out_dir = "out";
  int snapshots = 5;

  /// Config file bytes, hashed into the manifest.
  std::string raw;
};

/// Parses the key/section text. Unknown sections or keys, malformed numbers
/// and out-of-range values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

Grid make_grid(const RunConfig& cfg);
Field make_field(const RecipeSpec& spec, const Grid& grid);
Eigen::VectorXd make_stations(const RunConfig& cfg, const Grid& grid);
ObservationLayout make_layout(const RunConfig& cfg, const Grid& grid);
/// Twin experiment described by the config.
AssimilationProblem make_problem(const RunConfig& cfg, const Grid& grid);
Control make_truth(const RunConfig& cfg, const Grid& grid);

}  // namespace swe::cli
