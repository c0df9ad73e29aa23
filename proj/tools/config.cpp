#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "swe/recipes.hpp"

namespace swe::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"half_length", "n_cells", "horizon", "courant", "dt", "n_steps", "c_cfl", "dissipation"}},
      {"problem", {"kind"}},
      {"truth", {"recipe", "amplitude", "center", "width", "k_min", "k_max", "seed", "height"}},
      {"known", {"recipe", "amplitude", "center", "width", "k_min", "k_max", "seed", "height"}},
      {"first_guess", {"recipe", "amplitude", "center", "width", "k_min", "k_max", "seed", "height"}},
      {"observations", {"stations", "station_count", "station_layout", "stride", "start_level", "noise_sd", "seed"}},
      {"optimizer", {"max_iters", "rel_tol", "abs_tol", "armijo_c1", "max_halvings", "probe_size", "flat_cost_tol"}},
      {"kappa", {"eps_min", "eps_max", "eps_count", "direction_seed", "hvp_trials", "hvp_eps", "symmetry_trials"}},
      {"sensitivity",
       {"response", "x0", "rel_tol", "max_iter", "tikhonov", "sign", "optimality_factor", "oracle_delta",
        "oracle_rel_tol", "oracle_max_iters", "oracle_flat_cost_tol"}},
      {"output", {"directory", "snapshots"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("'" + key + "': not a finite number: '" + value + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("'" + key + "': not an integer: '" + value + "'");
  }
  return out;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }
  std::string text(const std::string& key) const { return trim(tree_->get<std::string>(key)); }
  std::string full(const std::string& key) const { return name_ + "." + key; }

  void read(const std::string& key, double& out) const {
    if (has(key)) out = to_double(full(key), text(key));
  }
  void read(const std::string& key, int& out) const {
    if (has(key)) out = static_cast<int>(to_int(full(key), text(key)));
  }
  void read(const std::string& key, Index& out) const {
    if (has(key)) out = static_cast<Index>(to_int(full(key), text(key)));
  }
  void read(const std::string& key, std::uint64_t& out) const {
    if (has(key)) {
      const long long v = to_int(full(key), text(key));
      if (v < 0) throw ConfigError("'" + full(key) + "' must be non-negative");
      out = static_cast<std::uint64_t>(v);
    }
  }
  void read(const std::string& key, std::string& out) const {
    if (has(key)) out = text(key);
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

RecipeSpec read_recipe(const Section& s) {
  RecipeSpec spec;
  s.read("recipe", spec.name);
  for (const char* key : {"amplitude", "center", "width", "k_min", "k_max", "seed", "height"}) {
    if (s.has(key)) spec.params[key] = to_double(s.full(key), s.text(key));
  }
  return spec;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

double param(const RecipeSpec& spec, const std::string& key) {
  const auto it = spec.params.find(key);
  if (it == spec.params.end()) throw ConfigError("recipe '" + spec.name + "' needs parameter '" + key + "'");
  return it->second;
}

double param_or(const RecipeSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name);
  };

  RunConfig cfg;
  cfg.raw = text;

  const Section grid = section("grid");
  grid.read("half_length", cfg.half_length);
  grid.read("n_cells", cfg.n_cells);
  grid.read("horizon", cfg.horizon);
  grid.read("courant", cfg.courant);
  grid.read("dt", cfg.dt);
  grid.read("n_steps", cfg.n_steps);
  grid.read("c_cfl", cfg.c_cfl);
  grid.read("dissipation", cfg.dissipation);
  require((cfg.dt > 0.0) == (cfg.n_steps > 0), "[grid] dt and n_steps must be given together");

  std::string kind = "ic";
  section("problem").read("kind", kind);
  if (kind == "ic") {
    cfg.kind = ControlKind::InitialCondition;
  } else if (kind == "bathymetry") {
    cfg.kind = ControlKind::Bathymetry;
  } else {
    throw ConfigError("[problem] kind must be 'ic' or 'bathymetry', got '" + kind + "'");
  }
  cfg.truth = read_recipe(section("truth"));
  cfg.known = read_recipe(section("known"));
  cfg.first_guess = read_recipe(section("first_guess"));

  const Section obs = section("observations");
  if (obs.has("stations")) {
    std::stringstream list(obs.text("stations"));
    std::string item;
    while (std::getline(list, item, ',')) cfg.stations.push_back(to_double("observations.stations", item));
  }
  obs.read("station_count", cfg.station_count);
  obs.read("station_layout", cfg.station_layout);
  obs.read("stride", cfg.stride);
  obs.read("start_level", cfg.start_level);
  obs.read("noise_sd", cfg.noise_sd);
  obs.read("seed", cfg.seed);
  require(cfg.stations.empty() != (cfg.station_count == 0),
          "[observations] give exactly one of 'stations' or 'station_count'");
  require(cfg.station_count >= 0, "[observations] station_count must be non-negative");
  require(cfg.station_layout == "uniform" || cfg.station_layout == "staggered",
          "[observations] station_layout must be 'uniform' or 'staggered'");
  require(cfg.stride >= 1, "[observations] stride must be >= 1");
  require(cfg.start_level >= 0, "[observations] start_level must be >= 0");
  require(cfg.noise_sd >= 0.0, "[observations] noise_sd must be >= 0");

  const Section opt = section("optimizer");
  opt.read("max_iters", cfg.optimizer.max_iters);
  opt.read("rel_tol", cfg.optimizer.rel_tol);
  opt.read("abs_tol", cfg.optimizer.abs_tol);
  opt.read("armijo_c1", cfg.optimizer.armijo_c1);
  opt.read("max_halvings", cfg.optimizer.max_halvings);
  opt.read("probe_size", cfg.optimizer.probe_size);
  opt.read("flat_cost_tol", cfg.optimizer.flat_cost_tol);
  require(cfg.optimizer.max_iters >= 0, "[optimizer] max_iters must be >= 0");
  require(cfg.optimizer.armijo_c1 > 0.0 && cfg.optimizer.armijo_c1 < 1.0, "[optimizer] armijo_c1 must lie in (0, 1)");
  require(cfg.optimizer.max_halvings >= 1, "[optimizer] max_halvings must be >= 1");
  require(cfg.optimizer.probe_size > 0.0, "[optimizer] probe_size must be positive");
  require(cfg.optimizer.flat_cost_tol >= 0.0, "[optimizer] flat_cost_tol must be >= 0");

  const Section kap = section("kappa");
  kap.read("eps_min", cfg.eps_min);
  kap.read("eps_max", cfg.eps_max);
  kap.read("eps_count", cfg.eps_count);
  kap.read("direction_seed", cfg.direction_seed);
  kap.read("hvp_trials", cfg.hvp_trials);
  kap.read("hvp_eps", cfg.hvp_eps);
  kap.read("symmetry_trials", cfg.symmetry_trials);
  require(cfg.eps_min > 0.0 && cfg.eps_max > cfg.eps_min && cfg.eps_count >= 2, "[kappa] bad epsilon sweep");
  require(cfg.hvp_trials >= 1 && cfg.symmetry_trials >= 1 && cfg.hvp_eps > 0.0, "[kappa] bad hvp-check settings");

  const Section sen = section("sensitivity");
  sen.read("response", cfg.response);
  sen.read("x0", cfg.x0);
  sen.read("rel_tol", cfg.sensitivity.cg_rel_tol);
  sen.read("max_iter", cfg.sensitivity.cg_max_iter);
  sen.read("tikhonov", cfg.sensitivity.tikhonov);
  sen.read("optimality_factor", cfg.sensitivity.optimality_factor);
  std::string sign = "consistent";
  sen.read("sign", sign);
  if (sign == "consistent") {
    cfg.sensitivity.sign = ForcedSign::Consistent;
  } else if (sign == "literal") {
    cfg.sensitivity.sign = ForcedSign::LiteralIc;
  } else {
    throw ConfigError("[sensitivity] sign must be 'consistent' or 'literal'");
  }
  sen.read("oracle_delta", cfg.oracle.delta);
  sen.read("oracle_rel_tol", cfg.oracle.rel_tol);
  sen.read("oracle_max_iters", cfg.oracle.max_iters);
  sen.read("oracle_flat_cost_tol", cfg.oracle.flat_cost_tol);
  bool known_response = false;
  for (const auto& name : builtin_responses()) known_response |= name == cfg.response;
  require(known_response, "[sensitivity] unknown response '" + cfg.response + "'");
  require(cfg.sensitivity.cg_rel_tol > 0.0 && cfg.sensitivity.cg_max_iter >= 1, "[sensitivity] bad CG settings");
  require(cfg.sensitivity.tikhonov >= 0.0, "[sensitivity] tikhonov must be >= 0");
  require(cfg.oracle.delta > 0.0 && cfg.oracle.rel_tol > 0.0 && cfg.oracle.max_iters >= 1 && cfg.oracle.flat_cost_tol >= 0.0,
          "[sensitivity] bad oracle settings");

  const Section out = section("output");
  out.read("directory", cfg.out_dir);
  out.read("snapshots", cfg.snapshots);
  require(cfg.snapshots >= 1, "[output] snapshots must be >= 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Grid make_grid(const RunConfig& cfg) {
  try {
    if (cfg.n_steps > 0) return Grid(cfg.half_length, cfg.n_cells, cfg.dt, cfg.n_steps, cfg.c_cfl, cfg.dissipation);
    return Grid::with_courant(cfg.half_length, cfg.n_cells, cfg.horizon, cfg.courant, cfg.c_cfl, cfg.dissipation);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[grid] ") + e.what());
  }
}

Field make_field(const RecipeSpec& spec, const Grid& grid) {
  try {
    if (spec.name == "zero") return Field::Zero(grid.n_cells());
    if (spec.name == "gaussian") {
      return recipes::gaussian(grid, param(spec, "amplitude"), param(spec, "center"), param(spec, "width"));
    }
    if (spec.name == "sandbar") {
      return recipes::sandbar(grid, param(spec, "height"), param(spec, "center"), param(spec, "width"));
    }
    if (spec.name == "cosine_pack") {
      const double seed = param(spec, "seed");
      if (seed < 0.0) throw ConfigError("cosine_pack seed must be non-negative");
      return recipes::cosine_pack(grid, static_cast<int>(param(spec, "k_min")), static_cast<int>(param(spec, "k_max")),
                                  static_cast<std::uint64_t>(seed), param_or(spec, "amplitude", 1e-2));
    }
  } catch (const DomainError& e) {
    throw ConfigError("recipe '" + spec.name + "': " + e.what());
  }
  throw ConfigError("unknown recipe '" + spec.name + "'");
}

Eigen::VectorXd make_stations(const RunConfig& cfg, const Grid& grid) {
  if (!cfg.stations.empty()) return Eigen::Map<const Eigen::VectorXd>(cfg.stations.data(), cfg.stations.size());
  const Index count = cfg.station_count;
  if (count > grid.n_cells()) throw ConfigError("[observations] more stations than cells");
  Eigen::VectorXd x(count);
  for (Index j = 0; j < count; ++j) {
    Index cell = (2 * j + 1) * grid.n_cells() / (2 * count);
    // Alternate the cell parity so both halves of the central-difference
    // stencil are observed.
    if (cfg.station_layout == "staggered" && j % 2 == 1) cell = (cell + 1) % grid.n_cells();
    x[j] = grid.x(cell);
  }
  return x;
}

ObservationLayout make_layout(const RunConfig& cfg, const Grid& grid) {
  std::vector<double> times;
  for (Index n = cfg.start_level; n <= grid.n_steps(); n += cfg.stride) times.push_back(grid.time(n));
  try {
    return ObservationLayout(grid, make_stations(cfg, grid), times);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[observations] ") + e.what());
  } catch (const AlignmentError& e) {
    throw ConfigError(std::string("[observations] ") + e.what());
  }
}

Control make_truth(const RunConfig& cfg, const Grid& grid) { return Control{cfg.kind, make_field(cfg.truth, grid)}; }

AssimilationProblem make_problem(const RunConfig& cfg, const Grid& grid) {
  const Control truth = make_truth(cfg, grid);
  const Field known = make_field(cfg.known, grid);
  const Field guess = make_field(cfg.first_guess, grid);
  try {
    return make_twin(grid, truth, known, make_layout(cfg, grid), cfg.noise_sd, cfg.seed, guess);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("problem setup: ") + e.what());
  }
}

}  // namespace swe::cli
