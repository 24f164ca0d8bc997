#include "commands.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>

#include "output.hpp"
#include "qlpme/equilibrium.hpp"

namespace qlpme::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

void poll_interrupt() {
  if (interrupt_flag().load()) throw Cancelled();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json estimates_json(const EstimateReport& e) {
  json grads = json::object();
  for (const auto& [l, v] : e.grad_norms) grads[std::to_string(l)] = v;
  return json{{"n", e.n},
              {"energy", e.energy},
              {"sup_grad_norms", grads},
              {"time_deriv_sq", e.time_deriv_sq},
              {"weighted_power", e.weighted_power}};
}

SpatialGrid make_grid(const RunConfig& c) { return SpatialGrid(c.x_a, c.x_b, c.nx); }
TimeGrid make_tgrid(const RunConfig& c) { return TimeGrid(c.horizon, c.nt); }

}  // namespace

fs::path output_directory(const RunConfig& config) {
  if (const char* env = std::getenv("QLT_PME_OUT"); env && *env) return fs::path(env);
  return config.output.directory;
}

PresetData build_data(const RunConfig& config, const SpatialGrid& grid, const TimeGrid& tgrid) {
  const auto& d = config.data;
  PresetData base = make_preset(*parse_preset(d.preset), grid, tgrid, d.params);
  if (!d.f0_csv && !d.W0_csv && !d.phi0_csv && !d.g0_csv) return base;
  if (d.W0_csv && d.phi0_csv) {
    throw ConfigError("data.W0_csv: conflicts with data.phi0_csv (both define w0)");
  }

  ScalarField f0 = base.kinetic.f0;
  if (d.f0_csv) f0 = sample_csv_onto(read_xy_csv(*d.f0_csv), grid, "data.f0_csv");

  std::optional<KineticData> kin;
  try {
    if (d.W0_csv) {
      const auto rows = read_xy_csv(*d.W0_csv);
      Eigen::ArrayXd k(static_cast<Index>(rows.size()));
      Eigen::ArrayXd W(static_cast<Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        k(static_cast<Index>(i)) = rows[i].first;
        W(static_cast<Index>(i)) = rows[i].second;
      }
      kin = KineticData::from_spectrum(f0, SpectralSamples(k, W));
    } else if (d.phi0_csv) {
      kin = KineticData::from_reduced(
          f0, sample_csv_onto(read_xy_csv(*d.phi0_csv), grid, "data.phi0_csv"));
    } else {
      kin = KineticData::from_reduced(f0, base.kinetic.w0);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("data: ") + e.what());
  }
  if (d.g0_csv) kin->g0 = sample_csv_onto(read_xy_csv(*d.g0_csv), grid, "data.g0_csv");

  const ScalarField phi0 = (d.W0_csv || d.phi0_csv) ? kin->w0 : base.problem.phi0;
  const ScalarField u0 = (d.W0_csv || d.phi0_csv) ? kin->w0 : base.u0;
  try {
    ProblemData problem(tgrid, phi0, kin->g0);
    return PresetData{std::move(*kin), std::move(problem), u0};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("data: ") + e.what());
  }
}

int cmd_solve(const RunConfig& config, std::ostream& log) {
  const SpatialGrid grid = make_grid(config);
  const TimeGrid tgrid = make_tgrid(config);
  const PresetData data = build_data(config, grid, tgrid);
  const SolveReport report = solve_sn(data.problem, RegularizationFamily(config.n),
                                      config.solver_config());
  poll_interrupt();
  const EstimateReport est =
      estimate_report(report.solution, config.n, config.functionals.l_values,
                      config.functionals.theta, TestFunctionSpec::psi_poly());
  const double floor = SolveReport::coercivity_floor(grid, config.n);
  const bool coercive = report.coercivity_min >= floor;

  OutputStage stage(output_directory(config));
  if (config.output.csv) {
    std::ostringstream csv;
    csv << "t,x,u\n";
    for (Index m = 0; m < tgrid.levels(); ++m) {
      const std::string t = format_number(tgrid.t(m));
      for (Index i = 0; i < grid.nx(); ++i) {
        csv << t << ',' << format_number(grid.x(i)) << ','
            << format_number(report.solution.values(i, m)) << '\n';
      }
    }
    stage.write("solution.csv", csv.str());
  }
  if (config.output.json) {
    const json j{{"config", config.to_json()},
                 {"solve",
                  {{"n", config.n},
                   {"max_principle_ok", report.max_principle_ok},
                   {"coercivity_min", report.coercivity_min},
                   {"coercivity_floor", floor},
                   {"lower_violation", report.lower_violation},
                   {"upper_violation", report.upper_violation},
                   {"substeps", report.substeps},
                   {"compatibility_defect", report.compatibility_defect},
                   {"final_max", report.solution.final_level().values.maxCoeff()}}},
                 {"estimates", estimates_json(est)}};
    stage.write("report.json", dump(j));
  }
  if (config.output.svg) {
    stage.write("solution.svg",
                heatmap_svg(report.solution, "u_n over Q_T, n = " + std::to_string(config.n)));
  }
  poll_interrupt();
  stage.commit();

  log << "solve n=" << config.n << " max_principle_ok=" << report.max_principle_ok
      << " coercivity_min=" << report.coercivity_min << " (" << report.wallclock_seconds
      << " s)\n";
  if (!report.max_principle_ok || !coercive) {
    log << "invariant violation: "
        << (!report.max_principle_ok ? "maximum principle breached" : "coercivity floor breached")
        << "\n";
    return kInvariantViolation;
  }
  return kSuccess;
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  if (config.n_list.size() < 2) {
    throw ConfigError("regularization.n_list: sweep needs at least two entries");
  }
  const SpatialGrid grid = make_grid(config);
  const TimeGrid tgrid = make_tgrid(config);
  const PresetData data = build_data(config, grid, tgrid);

  SweepPlan plan;
  plan.n_values = config.n_list;
  plan.functionals = config.functionals;
  plan.solver = config.solver_config();
  plan.cancelled = [] { return interrupt_flag().load(); };
  const ConvergenceReport rep = run_sweep(data.problem, plan);

  std::vector<RefinementLevel> refinement;
  if (!config.refinement_grids.empty()) {
    poll_interrupt();
    refinement = refinement_study(
        [&](const SpatialGrid& g, const TimeGrid& tg) { return build_data(config, g, tg).problem; },
        grid, config.horizon, config.refinement_grids, config.n_list.back(), plan.etas,
        plan.solver);
  }
  poll_interrupt();

  OutputStage stage(output_directory(config));
  const auto& ls = config.functionals.l_values;
  if (config.output.csv) {
    std::ostringstream csv;
    csv << "n,pairwise_l2,grad_sigma,mixed_functional,ae_proxy,energy";
    for (int l : ls) csv << ",grad_l" << l;
    csv << ",time_deriv_sq,weighted_power,weak_residual,max_principle_ok\n";
    const double sigma = config.functionals.sigma;
    for (std::size_t i = 0; i < rep.members.size(); ++i) {
      const int n = rep.members[i].n;
      const auto& e = rep.estimates[i];
      auto cell = [](const std::map<int, double>& m, int key) {
        const auto it = m.find(key);
        return it == m.end() ? std::string() : format_number(it->second);
      };
      const auto gs = rep.grad_sigma_norms.find({n, sigma});
      csv << n << ',' << cell(rep.pairwise_l2, n) << ','
          << (gs == rep.grad_sigma_norms.end() ? std::string() : format_number(gs->second)) << ','
          << cell(rep.mixed_functional, n) << ',' << cell(rep.ae_proxy, n) << ',' << format_number(e.energy);
      for (int l : ls) csv << ',' << format_number(e.grad_norms.at(l));
      csv << ',' << format_number(e.time_deriv_sq) << ',' << format_number(e.weighted_power) << ','
          << format_number(rep.members[i].weak_residual_max) << ','
          << (rep.members[i].max_principle_ok ? "true" : "false") << '\n';
    }
    stage.write("convergence.csv", csv.str());
    if (config.output.snapshots) {
      std::ostringstream snap;
      snap << "n,x,u_final\n";
      for (const auto& [n, level] : rep.final_levels) {
        for (Index i = 0; i < grid.nx(); ++i) {
          snap << n << ',' << format_number(grid.x(i)) << ',' << format_number(level[i]) << '\n';
        }
      }
      stage.write("snapshots.csv", snap.str());
    }
  }
  if (config.output.json) {
    json members = json::array();
    for (const auto& m : rep.members) {
      members.push_back({{"n", m.n},
                         {"max_principle_ok", m.max_principle_ok},
                         {"coercivity_min", m.coercivity_min},
                         {"lower_violation", m.lower_violation},
                         {"upper_violation", m.upper_violation},
                         {"weak_residual_max", m.weak_residual_max}});
    }
    auto by_n = [](const std::map<int, double>& m) {
      json j = json::object();
      for (const auto& [n, v] : m) j[std::to_string(n)] = v;
      return j;
    };
    json grad_sigma = json::array();
    for (const auto& [key, v] : rep.grad_sigma_norms) {
      grad_sigma.push_back({{"n", key.first}, {"sigma", key.second}, {"value", v}});
    }
    json estimates = json::array();
    for (const auto& e : rep.estimates) estimates.push_back(estimates_json(e));
    json refine = json::array();
    for (const auto& r : refinement) {
      refine.push_back({{"nx", r.nx},
                        {"nt", r.nt},
                        {"weak_residual_max", r.weak_residual_max},
                        {"final_sup", r.final_sup}});
    }
    const json j{{"config", config.to_json()},
                 {"reference_n", rep.reference_n},
                 {"failed", rep.failed},
                 {"members", members},
                 {"pairwise_l2", by_n(rep.pairwise_l2)},
                 {"grad_sigma_norms", grad_sigma},
                 {"mixed_functional", by_n(rep.mixed_functional)},
                 {"ae_proxy", by_n(rep.ae_proxy)},
                 {"weak_residuals", rep.weak_residuals},
                 {"estimates", estimates},
                 {"refinement", refine}};
    stage.write("convergence.json", dump(j));
  }
  if (config.output.svg) {
    std::vector<double> ns;
    PlotSeries l2{"||u_n - u_next||_L2", {}};
    PlotSeries ae{"a.e. proxy", {}};
    PlotSeries lm{"mixed functional", {}};
    PlotSeries en{"energy", {}};
    for (std::size_t i = 0; i + 1 < rep.members.size(); ++i) {
      const int n = rep.members[i].n;
      ns.push_back(n);
      l2.values.push_back(rep.pairwise_l2.at(n));
      ae.values.push_back(rep.ae_proxy.at(n));
      lm.values.push_back(rep.mixed_functional.at(n));
      en.values.push_back(rep.estimates[i].energy);
    }
    stage.write("convergence.svg",
                line_plot_svg(ns, {l2, ae, lm, en}, "n-sweep diagnostics", "n"));
  }
  poll_interrupt();
  stage.commit();

  log << "sweep over " << rep.members.size() << " values of n, reference n=" << rep.reference_n
      << (rep.failed ? ": invariant violation\n" : ": ok\n");
  return rep.failed ? kInvariantViolation : kSuccess;
}

int cmd_equilibrium(const RunConfig& config, std::ostream& log) {
  const SpatialGrid grid = make_grid(config);
  const TimeGrid tgrid = make_tgrid(config);
  const PresetData data = build_data(config, grid, tgrid);
  const EquilibriumResult eq = compute_equilibrium(data.u0, data.kinetic.f0, data.problem.g0);

  const ScalarField profile = stationarity_profile(eq.M_plus, data.problem.g0);
  double residual_positive = 0.0;
  json free_boundary = json::array();
  for (Index i = 1; i + 1 < grid.nx(); ++i) {
    if (eq.M[i] > 0.0) residual_positive = std::max(residual_positive, profile[i]);
    if ((eq.M[i] > 0.0) != (eq.M[i + 1] > 0.0) && i + 1 < grid.nx() - 1) {
      free_boundary.push_back(grid.x(i));
    }
  }

  OutputStage stage(output_directory(config));
  if (config.output.csv) {
    std::ostringstream csv;
    csv << "x,M,M_plus\n";
    for (Index i = 0; i < grid.nx(); ++i) {
      csv << format_number(grid.x(i)) << ',' << format_number(eq.M[i]) << ','
          << format_number(eq.M_plus[i]) << '\n';
    }
    stage.write("equilibrium.csv", csv.str());
  }
  if (config.output.json) {
    const json j{{"config", config.to_json()},
                 {"positive_everywhere", eq.positive_everywhere},
                 {"residual_inf", eq.residual_inf},
                 {"residual_on_positive_set", residual_positive},
                 {"free_boundary", free_boundary},
                 {"min_M", eq.M.values.minCoeff()},
                 {"max_M", eq.M.values.maxCoeff()}};
    stage.write("equilibrium.json", dump(j));
  }
  if (config.output.svg) {
    const SpaceTimeField strip(grid, TimeGrid(1.0, 1), eq.M_plus.values.replicate(1, 2));
    stage.write("equilibrium.svg", heatmap_svg(strip, "M_plus(x)"));
  }
  poll_interrupt();
  stage.commit();

  log << "equilibrium positive_everywhere=" << eq.positive_everywhere
      << " residual_inf=" << eq.residual_inf << "\n";
  return kSuccess;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
  const auto& d = config.data;
  if (d.f0_csv || d.W0_csv || d.phi0_csv || d.g0_csv) {
    throw ConfigError("data: validate runs on presets only; remove the *_csv keys");
  }
  const auto results = run_validation(config.validation_settings());
  print_validation_table(log, results);
  const bool ok = all_passed(results);
  log << (ok ? "all criteria passed\n" : "some criteria failed\n");
  return ok ? kSuccess : kInvariantViolation;
}

int guarded_run(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Cancelled&) {
    err << "error: interrupted; partial outputs removed\n";
    return kNumericalFailure;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const fs::filesystem_error& e) {
    err << "output error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace qlpme::cli
