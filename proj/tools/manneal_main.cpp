#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manneal/config.hpp"
#include "manneal/errors.hpp"
#include "manneal/landscape.hpp"
#include "manneal/serialize.hpp"
#include "manneal/simulator.hpp"

namespace {

using namespace manneal;

constexpr int kExitConfig = 2;
constexpr int kExitDegraded = 3;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IngestionError("write failed: " + path);
}

std::string verdict_line(bool ok) { return ok ? "PASS" : "FAIL"; }

// Human-readable schedule validation report shared by `oracle` and
// `validate-schedule`.
std::string render_validation(const ExperimentConfig& cfg, double b_estimate,
                              const ValidationReport& report) {
  std::ostringstream out;
  out << "b_estimate: " << format_double(b_estimate) << "\n";
  if (cfg.schedule.kind == ScheduleKind::Canonical) {
    out << "c: " << format_double(cfg.schedule.c) << "\n"
        << "threshold_2b: " << format_double(2.0 * b_estimate) << "\n"
        << "c_check: " << verdict_line(report.c_check) << "\n";
  } else {
    out << "c_check: not applicable (user schedule table)\n";
  }
  out << "at_horizon: alpha=" << format_double(report.at_horizon.alpha)
      << " beta=" << format_double(report.at_horizon.beta)
      << " delta=" << format_double(report.at_horizon.delta) << "\n";
  out << "admissibility_ratio_monotone_decay: "
      << (report.monotone_decay ? "true" : "false") << "\n";
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  out << "ratio_samples:\n";
  for (const RatioSample& s : report.ratio)
    out << "  t=" << format_double(s.t) << " ratio=" << format_double(s.ratio)
        << "\n";
  return out.str();
}

std::string minimizers_csv(const GridLandscape& L, const std::vector<int>& mins) {
  std::string out = "index,c0,c1,c2,value\r\n";
  for (int i : mins) {
    const ManifoldPoint& p = L.points[static_cast<size_t>(i)];
    out += std::to_string(i);
    for (double c : p.coords) {
      out += ',';
      out += format_double(c);
    }
    out += ',';
    out += format_double(L.values[static_cast<size_t>(i)]);
    out += "\r\n";
  }
  return out;
}

int cmd_print_config(const ExperimentConfig& cfg) {
  std::cout << cfg.canonical;
  return 0;
}

int cmd_validate_schedule(const ExperimentConfig& cfg) {
  GridLandscape L = build_landscape(cfg.cost, cfg.measure, 0.0, cfg.oracle.resolution);
  const double b = critical_depth(L);
  ValidationReport report = validate(cfg.schedule, b, cfg.oracle.validation_horizon,
                                     dimension(cfg.manifold));
  std::cout << render_validation(cfg, b, report);
  return 0;
}

int cmd_oracle(const ExperimentConfig& cfg) {
  const std::string dir = run_directory(cfg);
  std::filesystem::create_directories(dir);

  GridLandscape L = build_landscape(cfg.cost, cfg.measure, 0.0, cfg.oracle.resolution);
  export_landscape(L, dir + "/landscape.csv");
  const std::vector<int> mins = brute_min(L, cfg.oracle.tol);
  write_text(dir + "/minimizers.csv", minimizers_csv(L, mins));
  const double b = critical_depth(L);
  write_text(dir + "/critical_depth.txt", format_double(b) + "\n");

  std::string gibbs_csv = "beta,delta,radius,mass\r\n";
  for (const GibbsRequest& g : cfg.oracle.gibbs) {
    GridLandscape Ld = build_landscape(cfg.cost, cfg.measure, g.delta, cfg.oracle.resolution);
    const std::vector<int> centers = brute_min(Ld, cfg.oracle.tol);
    GibbsTable table = gibbs(Ld, g.beta);
    for (double r : cfg.oracle.radii) {
      const double mass = neighborhood_mass(Ld, table.masses, centers, r);
      gibbs_csv += format_double(g.beta) + "," + format_double(g.delta) + "," +
                   format_double(r) + "," + format_double(mass) + "\r\n";
    }
  }
  write_text(dir + "/gibbs_masses.csv", gibbs_csv);

  ValidationReport report = validate(cfg.schedule, b, cfg.oracle.validation_horizon,
                                     dimension(cfg.manifold));
  const std::string rendered = render_validation(cfg, b, report);
  write_text(dir + "/schedule_validation.txt", rendered);
  write_text(dir + "/config.json", cfg.canonical);

  std::cout << "b(U) = " << format_double(b) << "\n";
  if (cfg.schedule.kind == ScheduleKind::Canonical)
    std::cout << "c_check: " << verdict_line(report.c_check) << "\n";
  std::cout << "wrote " << dir << "\n";
  return 0;
}

int cmd_run(const ExperimentConfig& cfg) {
  SimConfig sc = to_sim_config(cfg);
  EnsembleRecord record = run_ensemble(sc);
  record.config_hash = config_hash(cfg);

  const std::string dir = run_directory(cfg);
  std::filesystem::create_directories(dir);
  for (const std::string& format : cfg.output.formats) {
    if (format == "csv") write_text(dir + "/record.csv", ensemble_csv(record));
    if (format == "json") write_text(dir + "/record.json", ensemble_json(record));
  }
  write_text(dir + "/config.json", cfg.canonical);

  const int completed = record.replicas - static_cast<int>(record.failures.size());
  std::ostringstream summary;
  summary << "replicas_completed: " << completed << "/" << record.replicas << "\n";
  size_t shown = 0;
  for (const ReplicaFailure& f : record.failures) {
    if (++shown > 5) {
      summary << "... " << (record.failures.size() - 5) << " more failures\n";
      break;
    }
    summary << "replica " << f.replica << " failed: " << f.error << "\n";
  }
  if (!record.snapshots.empty()) {
    const SnapshotStats& last = record.snapshots.back();
    summary << "final_t: " << format_double(last.t) << "\n";
    for (size_t i = 0; i < record.radii.size(); ++i)
      summary << "final_mass r=" << format_double(record.radii[i]) << ": "
              << format_double(last.masses[i]) << "\n";
    for (size_t i = 0; i < record.quantile_levels.size(); ++i)
      summary << "final_quantile q=" << format_double(record.quantile_levels[i])
              << ": " << format_double(last.quantiles[i]) << "\n";
    if (last.has_it)
      summary << "final_it: " << format_double(last.it_estimate) << "\n";
  }
  const std::string text = summary.str();
  write_text(dir + "/summary.txt", text);
  std::cout << text << "wrote " << dir << "\n";

  const bool healthy =
      static_cast<double>(completed) >= 0.95 * static_cast<double>(record.replicas);
  return healthy ? 0 : kExitDegraded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Annealed jump-diffusion experiments on compact manifolds.\n"
      "Replica loops parallelize with OpenMP; set OMP_NUM_THREADS to bound the "
      "thread count."};
  app.require_subcommand(1);

  std::string config_path;
  unsigned long long seed_override = 0;
  int replicas_override = 0;
  std::string out_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed_override, "Override simulation.seed");
    sub->add_option("--replicas", replicas_override, "Override simulation.replicas");
    sub->add_option("--out", out_override, "Override output.directory");
  };

  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "Write landscape, minimizer, b(U), Gibbs-mass, and schedule-validation files");
  CLI::App* run_cmd =
      app.add_subcommand("run", "Run the ensemble and write the record plus a summary");
  CLI::App* validate_cmd = app.add_subcommand(
      "validate-schedule", "Check the configured schedule against the landscape's b(U)");
  CLI::App* print_cmd =
      app.add_subcommand("print-config", "Echo the canonical form of the config");
  for (CLI::App* sub : {oracle_cmd, run_cmd, validate_cmd, print_cmd}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    ConfigOverrides overrides;
    if (active->count("--seed") > 0) overrides.seed = seed_override;
    if (active->count("--replicas") > 0) overrides.replicas = replicas_override;
    if (active->count("--out") > 0) overrides.out_dir = out_override;
    ExperimentConfig cfg;
    try {
      cfg = load_config(config_path, overrides);
    } catch (const IngestionError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
    if (app.got_subcommand(print_cmd)) return cmd_print_config(cfg);
    if (app.got_subcommand(validate_cmd)) return cmd_validate_schedule(cfg);
    if (app.got_subcommand(oracle_cmd)) return cmd_oracle(cfg);
    return cmd_run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
