#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "io.hpp"
#include "swe/hash.hpp"
#include "swe/observation.hpp"
#include "swe/recipes.hpp"

namespace swe::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  const CommandOptions& opt;
  const RunConfig& cfg;
  Grid grid;
  RunManifest& manifest;

  fs::path file(const std::string& name) const { return opt.out_dir / name; }
};

Control base_point(const AssimilationProblem& p) { return p.first_guess; }

void write_descent(const fs::path& path, const DescentReport& report) {
  CsvWriter csv(path, {"iteration", "cost", "grad_norm", "step"});
  for (const auto& it : report.iterates) csv.row({static_cast<long long>(it.iteration), it.cost, it.grad_norm, it.step});
}

json descent_summary(const DescentReport& report) {
  const auto& last = report.iterates.back();
  return {{"converged", report.converged},
          {"iterations", last.iteration},
          {"initial_cost", report.iterates.front().cost},
          {"final_cost", last.cost},
          {"initial_grad_norm", report.iterates.front().grad_norm},
          {"final_grad_norm", last.grad_norm},
          {"tolerance", report.tolerance}};
}

/// Runs descend, writes descent.csv even when the line search stalls.
DescentReport run_descent(const Context& ctx, const AssimilationProblem& p, json& summary) {
  try {
    DescentReport report = descend(p, ctx.cfg.optimizer);
    write_descent(ctx.file("descent.csv"), report);
    summary = descent_summary(report);
    spdlog::info("descent: {} iterations, |grad J| {:.3e} -> {:.3e}, converged={}", report.iterates.back().iteration,
                 report.iterates.front().grad_norm, report.iterates.back().grad_norm, report.converged);
    return report;
  } catch (const StallError& e) {
    write_descent(ctx.file("descent.csv"), e.report());
    summary = descent_summary(e.report());
    throw;
  }
}

void cmd_forward(const Context& ctx) {
  const Grid& g = ctx.grid;
  const Field truth = make_field(ctx.cfg.truth, g);
  const Field known = make_field(ctx.cfg.known, g);
  std::optional<StateTrajectory> traj;
  ctx.manifest.stage("forward", [&](json& s) {
    const bool ic = ctx.cfg.kind == ControlKind::InitialCondition;
    traj.emplace(solve_forward(ic ? ForwardProblem(g, truth, known) : ForwardProblem(g, known, truth)));
    s["n_steps"] = g.n_steps();
    s["dt"] = g.dt();
  });
  ctx.manifest.stage("write", [&](json& s) {
    const Index N = g.n_steps();
    const int count = ctx.cfg.snapshots;
    std::vector<Index> levels;
    for (int k = 0; k < count; ++k) {
      const Index level = count == 1 ? N : static_cast<Index>(std::llround(static_cast<double>(k) * N / (count - 1)));
      if (levels.empty() || levels.back() != level) levels.push_back(level);
    }
    CsvWriter snaps(ctx.file("snapshots.csv"), {"level", "time", "x", "eta", "u"});
    for (Index n : levels) {
      for (Index i = 0; i < g.n_cells(); ++i) {
        snaps.row({static_cast<long long>(n), g.time(n), g.x(i), traj->eta(n, i), traj->u(n, i)});
      }
    }
    CsvWriter mass_csv(ctx.file("mass.csv"), {"level", "time", "mass", "drift"});
    const double m0 = mass(*traj, 0);
    double worst = 0.0;
    for (Index n = 0; n <= N; ++n) {
      const double m = mass(*traj, n);
      worst = std::max(worst, std::abs(m - m0));
      mass_csv.row({static_cast<long long>(n), g.time(n), m, m - m0});
    }
    s["max_mass_drift"] = worst;
    ctx.manifest.extra()["max_mass_drift"] = worst;
    spdlog::info("forward: {} steps, max mass drift {:.3e}", N, worst);
  });
}

void cmd_assimilate(const Context& ctx) {
  const Grid& g = ctx.grid;
  std::optional<AssimilationProblem> p;
  ctx.manifest.stage("twin", [&](json& s) {
    p.emplace(make_problem(ctx.cfg, g));
    s["stations"] = p->observations.layout.n_obs();
    s["samples"] = p->observations.layout.n_times();
  });
  DescentReport report;
  ctx.manifest.stage("descend", [&](json& s) { report = run_descent(ctx, *p, s); });
  ctx.manifest.stage("write", [&](json& s) {
    const Field truth = make_field(ctx.cfg.truth, g);
    const Field& est = report.final_control.field;
    CsvWriter csv(ctx.file("control.csv"), {"x", "first_guess", "estimate", "truth"});
    for (Index i = 0; i < g.n_cells(); ++i) csv.row({g.x(i), p->first_guess.field(i), est(i), truth(i)});
    const double e0 = norm_l2_space(p->first_guess.field - truth, g);
    const double e1 = norm_l2_space(est - truth, g);
    s["initial_error"] = e0;
    s["final_error"] = e1;
    ctx.manifest.extra()["error_reduction"] = e1 > 0.0 ? e0 / e1 : 0.0;
    ctx.manifest.extra()["converged"] = report.converged;
  });
}

void cmd_kappa(const Context& ctx) {
  const Grid& g = ctx.grid;
  const AssimilationProblem p = make_problem(ctx.cfg, g);
  const std::vector<double> eps = epsilon_sweep(ctx.cfg.eps_min, ctx.cfg.eps_max, ctx.cfg.eps_count);
  const Field d1 = probe_direction(g, ctx.cfg.direction_seed);
  const Field d2 = probe_direction(g, ctx.cfg.direction_seed + 1);
  std::vector<double> k1, k2;
  auto best = [](const std::vector<double>& k) {
    double b = std::numeric_limits<double>::infinity();
    for (double v : k) b = std::min(b, std::abs(v - 1.0));
    return b;
  };
  ctx.manifest.stage("first_order", [&](json& s) {
    k1 = kappa_first_order(p, base_point(p), d1, eps);
    s["min_abs_kappa_minus_one"] = best(k1);
  });
  ctx.manifest.stage("second_order", [&](json& s) {
    const HessianOperator op(p, base_point(p));
    k2 = kappa_second_order(op, d1, d2, eps);
    s["min_abs_kappa_minus_one"] = best(k2);
  });
  CsvWriter csv(ctx.file("kappa.csv"), {"eps", "kappa_first_order", "kappa_second_order"});
  for (std::size_t i = 0; i < eps.size(); ++i) csv.row({eps[i], k1[i], k2[i]});
  spdlog::info("kappa: best |k1-1| {:.3e}, best |k2-1| {:.3e}", best(k1), best(k2));
}

void cmd_hvp_check(const Context& ctx) {
  const Grid& g = ctx.grid;
  const AssimilationProblem p = make_problem(ctx.cfg, g);
  const Control c = base_point(p);
  const double h = ctx.cfg.hvp_eps;
  std::optional<HessianOperator> op;
  ctx.manifest.stage("linearise", [&](json&) { op.emplace(p, c); });
  ctx.manifest.stage("directional_checks", [&](json& s) {
    CsvWriter csv(ctx.file("hvp_check.csv"),
                  {"trial", "grad_fd", "grad_adjoint", "grad_rel_error", "hvp_rel_error"});
    double worst_g = 0.0, worst_h = 0.0;
    for (int t = 0; t < ctx.cfg.hvp_trials; ++t) {
      const Field v = probe_direction(g, ctx.cfg.direction_seed + 100 + static_cast<std::uint64_t>(t));
      const Control plus{c.kind, c.field + h * v};
      const Control minus{c.kind, c.field - h * v};
      const Evaluation ep = evaluate(p, plus);
      const Evaluation em = evaluate(p, minus);
      const double fd = (ep.cost - em.cost) / (2.0 * h);
      const double an = inner_l2_space(op->evaluation().gradient, v, g);
      const double ge = std::abs(fd - an) / std::max(std::abs(fd), 1e-300);
      const Field hv_fd = (ep.gradient - em.gradient) / (2.0 * h);
      const Field hv = op->hvp(v);
      const double he = norm_l2_space(hv - hv_fd, g) / std::max(norm_l2_space(hv_fd, g), 1e-300);
      worst_g = std::max(worst_g, ge);
      worst_h = std::max(worst_h, he);
      csv.row({static_cast<long long>(t), fd, an, ge, he});
    }
    s["max_grad_rel_error"] = worst_g;
    s["max_hvp_rel_error"] = worst_h;
    spdlog::info("hvp-check: max gradient error {:.3e}, max hvp error {:.3e}", worst_g, worst_h);
  });
  ctx.manifest.stage("symmetry", [&](json& s) {
    const double asym = symmetry_check(*op, ctx.cfg.symmetry_trials, ctx.cfg.direction_seed, ctx.opt.threads);
    CsvWriter csv(ctx.file("symmetry.csv"), {"trials", "max_asymmetry"});
    csv.row({static_cast<long long>(ctx.cfg.symmetry_trials), asym});
    s["max_asymmetry"] = asym;
    spdlog::info("hvp-check: symmetry defect {:.3e}", asym);
  });
}

void cmd_sensitivity(const Context& ctx) {
  const Grid& g = ctx.grid;
  std::optional<AssimilationProblem> p;
  ctx.manifest.stage("twin", [&](json& s) {
    p.emplace(make_problem(ctx.cfg, g));
    s["stations"] = p->observations.layout.n_obs();
    s["samples"] = p->observations.layout.n_times();
  });
  DescentReport report;
  ctx.manifest.stage("descend", [&](json& s) { report = run_descent(ctx, *p, s); });
  const Control& optimum = report.final_control;
  const ResponseFunction rf = make_response(ctx.cfg.response, ctx.cfg.x0, make_field(ctx.cfg.truth, g));
  const ObservationLayout& layout = p->observations.layout;

  SensitivityResult res;
  ctx.manifest.stage("sensitivity", [&](json& s) {
    SensitivityOptions so = ctx.cfg.sensitivity;
    so.reference_gradient_norm = report.iterates.front().grad_norm;
    try {
      res = sensitivity(*p, optimum, rf, so);
    } catch (const CgNonConvergenceError& e) {
      CsvWriter csv(ctx.file("cg_residual.csv"), {"iteration", "residual_norm"});
      for (std::size_t i = 0; i < e.residual_history().size(); ++i) {
        csv.row({static_cast<long long>(i), e.residual_history()[i]});
      }
      throw;
    }
    res.config_hash = sha256_hex(ctx.cfg.raw);
    s["cg_iterations"] = res.cg.iterations;
    s["cg_relative_residual"] = res.cg.relative_residual;
    s["cg_rel_tol"] = so.cg_rel_tol;
    s["response"] = rf.name;
    s["point_hash"] = res.point_hash;
    spdlog::info("sensitivity: CG {} iterations, relative residual {:.3e}", res.cg.iterations,
                 res.cg.relative_residual);
  });
  ctx.manifest.stage("write", [&](json&) {
    CsvWriter dg(ctx.file("dG_dm.csv"), {"station", "x", "level", "time", "value"});
    for (Index k = 0; k < layout.n_times(); ++k) {
      for (Index j = 0; j < layout.n_obs(); ++j) {
        const Index level = layout.levels()[static_cast<std::size_t>(k)];
        dg.row({static_cast<long long>(j), layout.positions()(j), static_cast<long long>(level), g.time(level),
                res.dG_dm(j, k)});
      }
    }
    CsvWriter nu(ctx.file("nu.csv"), {"x", "nu", "F"});
    for (Index i = 0; i < g.n_cells(); ++i) nu.row({g.x(i), res.nu(i), res.F(i)});
    CsvWriter cg(ctx.file("cg_residual.csv"), {"iteration", "residual_norm"});
    for (std::size_t i = 0; i < res.cg.residual_history.size(); ++i) {
      cg.row({static_cast<long long>(i), res.cg.residual_history[i]});
    }
  });
  if (!ctx.opt.oracle) return;

  ctx.manifest.stage("oracle", [&](json& s) {
    OracleOptions oo = ctx.cfg.oracle;
    oo.threads = ctx.opt.threads;
    const ObsMatrix oracle = oracle_sensitivity(*p, optimum, rf, oo);
    const double scale = oracle.cwiseAbs().maxCoeff();
    CsvWriter csv(ctx.file("oracle.csv"), {"station", "level", "adjoint", "oracle", "rel_discrepancy"});
    double worst = 0.0;
    for (Index k = 0; k < layout.n_times(); ++k) {
      for (Index j = 0; j < layout.n_obs(); ++j) {
        const double a = res.dG_dm(j, k);
        const double o = oracle(j, k);
        const double rel = scale > 0.0 ? std::abs(a - o) / scale : std::abs(a - o);
        worst = std::max(worst, rel);
        csv.row({static_cast<long long>(j), static_cast<long long>(layout.levels()[static_cast<std::size_t>(k)]), a, o,
                 rel});
      }
    }
    const double denom = std::sqrt(inner_obs(oracle, oracle, layout));
    const double l2 = std::sqrt(inner_obs(res.dG_dm - oracle, res.dG_dm - oracle, layout));
    const double rel_l2 = denom > 0.0 ? l2 / denom : l2;
    s["delta"] = oo.delta;
    s["max_rel_discrepancy"] = worst;
    s["relative_l2_discrepancy"] = rel_l2;
    ctx.manifest.extra()["oracle_relative_l2_discrepancy"] = rel_l2;
    spdlog::info("oracle: relative L2 discrepancy {:.3e}", rel_l2);
  });
}

const std::map<std::string, std::function<void(const Context&)>>& registry() {
  static const std::map<std::string, std::function<void(const Context&)>> commands = {
      {"forward", cmd_forward},     {"assimilate", cmd_assimilate},   {"kappa", cmd_kappa},
      {"hvp-check", cmd_hvp_check}, {"sensitivity", cmd_sensitivity},
  };
  return commands;
}

}  // namespace

std::vector<std::string> command_names() { return {"forward", "assimilate", "kappa", "hvp-check", "sensitivity"}; }

Field probe_direction(const Grid& grid, std::uint64_t seed) {
  const int k_max = static_cast<int>(std::min<Index>(8, grid.n_cells() / 2 - 1));
  return recipes::cosine_pack(grid, 1, k_max, seed, 1.0);
}

std::vector<double> epsilon_sweep(double eps_min, double eps_max, int count) {
  if (!(eps_min > 0.0 && eps_max > eps_min && count >= 2)) throw DomainError("bad epsilon sweep");
  std::vector<double> out;
  const double a = std::log10(eps_max);
  const double b = std::log10(eps_min);
  for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
  return out;
}

int exit_code_for(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return kConfig;
  } catch (const DomainError&) {
    return kConfig;
  } catch (const AlignmentError&) {
    return kConfig;
  } catch (const SolverError&) {
    return kSolver;
  } catch (const StallError&) {
    return kOptimizer;
  } catch (const PreconditionError&) {
    return kOptimizer;
  } catch (const OracleError&) {
    return kOptimizer;
  } catch (const DegenerateDirectionError&) {
    return kDegenerate;
  } catch (const NotPositiveDefiniteError&) {
    return kCgFailure;
  } catch (const CgNonConvergenceError&) {
    return kCgFailure;
  } catch (...) {
    return 1;
  }
}

int run_command(const std::string& name, const CommandOptions& options) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    spdlog::error("unknown command '{}'", name);
    return kConfig;
  }
  try {
    fs::create_directories(options.out_dir);
  } catch (const fs::filesystem_error& e) {
    spdlog::error("cannot create output directory: {}", e.what());
    return kConfig;
  }
  RunManifest manifest(name, options.config.raw);
  manifest.extra()["kind"] = to_string(options.config.kind);
  manifest.extra()["threads"] = options.threads;
  int code = kOk;
  std::string message = "ok";
  try {
    Context ctx{options, options.config, make_grid(options.config), manifest};
    it->second(ctx);
  } catch (const std::exception& e) {
    code = exit_code_for(std::current_exception());
    message = e.what();
    spdlog::error("{}: {}", name, message);
  }
  try {
    manifest.write(options.out_dir, code, message);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    if (code == kOk) code = 1;
  }
  return code;
}

}  // namespace swe::cli
