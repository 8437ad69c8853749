#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fpaudit/calibration.hpp"
#include "fpaudit/checks.hpp"
#include "fpaudit/fingerprint.hpp"
#include "fpaudit/mechanisms.hpp"
#include "fpaudit/parallel.hpp"
#include "fpaudit/reductions.hpp"
#include "fpaudit/report.hpp"

namespace {

using fpaudit::AttackReport;
using fpaudit::Calibration;
using fpaudit::CheckResult;
using nlohmann::json;

struct ExperimentConfig {
  int d = 8;
  int n = 64;
  int trials = 1000;
  std::string mechanism = "dp-gauss-cov-shrunk";
  double epsilon = 1.0;
  double delta = 1e-6;
  double radius = 0.0;
  int batches = 1;
  std::vector<double> eps_sweep;
  std::vector<int> n_sweep;
  std::vector<int> d_list = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  std::vector<int> n_list = {10, 100, 1000, 10000, 100000, 1000000};
  bool full = false;
};

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j = json::parse(in);
  cfg.d = j.value("d", cfg.d);
  cfg.n = j.value("n", cfg.n);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.mechanism = j.value("mechanism", cfg.mechanism);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.radius = j.value("radius", cfg.radius);
  cfg.batches = j.value("batches", cfg.batches);
  if (j.contains("eps_sweep")) {
    cfg.eps_sweep = j["eps_sweep"].get<std::vector<double>>();
  }
  if (j.contains("n_sweep")) {
    cfg.n_sweep = j["n_sweep"].get<std::vector<int>>();
  }
  if (j.contains("d_list")) cfg.d_list = j["d_list"].get<std::vector<int>>();
  if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<int>>();
  cfg.full = j.value("full", cfg.full);

  if (cfg.d < 1 || cfg.n < 1 || cfg.trials < 1) {
    throw std::invalid_argument("config: d, n, trials must be positive");
  }
  if (!(cfg.delta >= 0.0 && cfg.delta < 1.0)) {
    throw std::invalid_argument("config: delta must be in [0, 1)");
  }
  auto ids = fpaudit::mechanism_ids();
  bool known = cfg.mechanism.rfind("median-boost(dp-gauss-cov", 0) == 0;
  for (const auto& id : ids) known = known || id == cfg.mechanism;
  if (!known) {
    throw std::invalid_argument("config: unknown mechanism " + cfg.mechanism);
  }
  for (double e : cfg.eps_sweep) {
    if (!(e > 0.0)) throw std::invalid_argument("config: eps_sweep > 0");
  }
  for (int n : cfg.n_sweep) {
    if (n < 30) throw std::invalid_argument("config: n_sweep entries >= 30");
  }
  return cfg;
}

fpaudit::Mechanism build_mechanism(const std::string& id,
                                   const ExperimentConfig& cfg,
                                   const Calibration& cal, double epsilon,
                                   int d) {
  fpaudit::MechanismParams mp;
  mp.epsilon = epsilon;
  mp.delta = cfg.delta;
  mp.radius = cfg.radius;
  mp.batches = cfg.batches;
  if (id == "dp-gauss-cov-shrunk") {
    mp.signal_power = cal.shrunk.signal_power;
    if (mp.radius <= 0.0) mp.radius = cal.shrunk.radius;
  }
  return fpaudit::make_mechanism(id, d, mp);
}

json check_to_json(const CheckResult& r) {
  json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["estimate"] = r.estimate;
  j["target"] = r.target;
  j["se"] = r.se;
  j["note"] = r.note;
  return j;
}

int emit_check_report(const std::vector<CheckResult>& results,
                      const std::string& out_dir, const std::string& name) {
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    arr.push_back(check_to_json(r));
    all = all && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << " estimate=" << fpaudit::format_double(r.estimate)
              << " target=" << fpaudit::format_double(r.target)
              << " se=" << fpaudit::format_double(r.se) << "\n";
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/" + name + ".json");
  out << arr.dump(2) << "\n";
  fpaudit::write_metadata(out_dir, name);
  std::cout << (all ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << "\n";
  return all ? 0 : 1;
}

int cmd_validate(const ExperimentConfig& cfg, const Calibration& cal,
                 std::uint64_t seed, int workers, const std::string& out_dir) {
  fpaudit::SuiteOptions so;
  so.seed = seed;
  so.workers = workers;
  so.full = cfg.full;
  auto results = fpaudit::run_validation_suite(cal, so);
  return emit_check_report(results, out_dir, "validate");
}

void sweep_row(fpaudit::CsvWriter& w, double sweep_value,
               const AttackReport& rep) {
  w.row({sweep_value, std::string(rep.mechanism_id),
         static_cast<long long>(rep.d), static_cast<long long>(rep.n),
         static_cast<long long>(rep.trials), rep.z_bar.mean, rep.z_bar.se,
         rep.z_prime.mean, rep.z_prime.se, rep.floor.mean, rep.floor.se,
         rep.mse_oracle.mean, rep.mse_oracle.se, rep.gamma_median,
         rep.gamma_q23, rep.dp_ceiling,
         std::string(rep.tension ? "true" : "false")});
}

int cmd_attack_sweep(const ExperimentConfig& cfg, const Calibration& cal,
                     std::uint64_t seed, int workers,
                     const std::string& out_dir, bool svg) {
  std::vector<double> eps = cfg.eps_sweep;
  const bool n_mode = !cfg.n_sweep.empty();
  if (!n_mode && eps.empty()) eps = {0.25, 0.4, 0.63, 1.0};

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/attack-sweep.csv", std::ios::binary);
  fpaudit::CsvWriter w(csv);
  w.row({std::string("sweep"), std::string("mechanism"), std::string("d"),
         std::string("n"), std::string("trials"), std::string("z_bar_mean"),
         std::string("z_bar_se"), std::string("z_prime_mean"),
         std::string("z_prime_se"), std::string("floor_mean"),
         std::string("floor_se"), std::string("mse_oracle_mean"),
         std::string("mse_oracle_se"), std::string("gamma_median"),
         std::string("gamma_q23"), std::string("dp_ceiling"),
         std::string("tension")});

  fpaudit::Rng root(seed);
  fpaudit::RunOptions ro;
  ro.workers = workers;
  ro.attack.zprime_subset = 8;
  ro.ceiling_constant = cal.attack_ceiling_c;

  json summary = json::array();
  fpaudit::SvgSeries dp_series{"dp z_bar", {}, {}};
  fpaudit::SvgSeries floor_series{"non-private floor", {}, {}};

  if (n_mode) {
    for (std::size_t i = 0; i < cfg.n_sweep.size(); ++i) {
      int n = cfg.n_sweep[i];
      auto mech = build_mechanism(cfg.mechanism, cfg, cal, cfg.epsilon, cfg.d);
      AttackReport rep = fpaudit::run_attack(mech, cfg.d, n, cfg.trials,
                                             root.child(i), ro);
      sweep_row(w, static_cast<double>(n), rep);
      summary.push_back(json::parse(fpaudit::attack_report_json(rep)));
      dp_series.x.push_back(static_cast<double>(n));
      dp_series.y.push_back(rep.z_bar.mean);
      floor_series.x.push_back(static_cast<double>(n));
      floor_series.y.push_back(rep.floor.mean);
    }
  } else {
    // Baseline row: the non-private mechanism has no eps dependence; it is
    // recorded once with sweep value 0.
    auto base = build_mechanism("empirical", cfg, cal, 1.0, cfg.d);
    AttackReport base_rep =
        fpaudit::run_attack(base, cfg.d, cfg.n, cfg.trials, root.child(100), ro);
    sweep_row(w, 0.0, base_rep);
    summary.push_back(json::parse(fpaudit::attack_report_json(base_rep)));

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      auto mech = build_mechanism(cfg.mechanism, cfg, cal, eps[i], cfg.d);
      AttackReport rep = fpaudit::run_attack(mech, cfg.d, cfg.n, cfg.trials,
                                             root.child(i), ro);
      sweep_row(w, eps[i], rep);
      summary.push_back(json::parse(fpaudit::attack_report_json(rep)));
      dp_series.x.push_back(eps[i]);
      dp_series.y.push_back(rep.z_bar.mean);
      floor_series.x.push_back(eps[i]);
      floor_series.y.push_back(base_rep.z_bar.mean);
      for (const auto& row : rep.rows) {
        xs.push_back(eps[i]);
        ys.push_back(row.z_bar);
      }
    }
    if (eps.size() >= 2) {
      auto sr = fpaudit::spearman(xs, ys);
      json mono;
      mono["spearman_rho"] = sr.rho;
      mono["spearman_p_one_sided"] = sr.p_one_sided;
      summary.push_back(mono);
    }
  }

  std::ofstream js(out_dir + "/attack-sweep.json", std::ios::binary);
  js << summary.dump(2) << "\n";
  if (svg) {
    std::ofstream sf(out_dir + "/attack-sweep.svg", std::ios::binary);
    sf << fpaudit::svg_line_plot({dp_series, floor_series},
                                 n_mode ? "n" : "epsilon",
                                 "per-sample statistic");
  }
  fpaudit::write_metadata(out_dir, "attack-sweep");
  std::cout << "attack-sweep: wrote " << out_dir << "/attack-sweep.csv\n";
  return 0;
}

int cmd_phase_diagram(const ExperimentConfig& cfg, const std::string& out_dir,
                      bool svg) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/phase-diagram.csv", std::ios::binary);
  fpaudit::CsvWriter w(csv);
  w.row({std::string("d"), std::string("n"), std::string("predicted_floor")});
  std::vector<fpaudit::SvgSeries> series;
  for (int d : cfg.d_list) {
    fpaudit::SvgSeries s{"d=" + std::to_string(d), {}, {}};
    for (int n : cfg.n_list) {
      double v = fpaudit::empirical_cov_error_floor(d, n);
      w.row({static_cast<long long>(d), static_cast<long long>(n), v});
      s.x.push_back(std::log10(static_cast<double>(n)));
      s.y.push_back(std::log10(v));
    }
    series.push_back(std::move(s));
  }
  if (svg) {
    std::ofstream sf(out_dir + "/phase-diagram.svg", std::ios::binary);
    sf << fpaudit::svg_line_plot(series, "log10 n", "log10 predicted floor");
  }
  fpaudit::write_metadata(out_dir, "phase-diagram");
  std::cout << "phase-diagram: wrote " << out_dir << "/phase-diagram.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fingerprinting lower-bound audit harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string calibration_path = fpaudit::default_calibration_path();
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int workers = fpaudit::default_workers();
  bool svg = false;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--calibration", calibration_path,
                 "calibration constants file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--svg", svg, "also write SVG plots");

  auto* validate = app.add_subcommand("validate", "run the full check suite");
  auto* sweep = app.add_subcommand("attack-sweep",
                                   "attack aggregates vs eps or n");
  auto* posterior = app.add_subcommand("posterior-check",
                                       "conjugate-posterior checks");
  auto* tails = app.add_subcommand("tails",
                                   "matrix-distribution and tail checks");
  auto* heavy = app.add_subcommand("heavy-tailed",
                                   "heavy-tailed mixture and padding checks");
  auto* phase = app.add_subcommand("phase-diagram",
                                   "predicted error-floor table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = load_config(config_path);
    Calibration cal = fpaudit::load_calibration(calibration_path);
    if (workers < 1) throw std::invalid_argument("--workers must be >= 1");

    if (validate->parsed()) {
      return cmd_validate(cfg, cal, seed, workers, out_dir);
    }
    if (sweep->parsed()) {
      return cmd_attack_sweep(cfg, cal, seed, workers, out_dir, svg);
    }
    if (posterior->parsed()) {
      auto results = fpaudit::check_conjugacy(seed, cfg.full ? 100000 : 20000,
                                              cfg.full ? 10000 : 2000,
                                              workers);
      return emit_check_report(results, out_dir, "posterior-check");
    }
    if (tails->parsed()) {
      auto results = fpaudit::check_matrix_distribution_facts(
          seed, cfg.full ? 50000 : 20000, workers);
      auto hw = fpaudit::check_hanson_wright(cal, seed + 1,
                                             cfg.full ? 200000 : 50000);
      results.insert(results.end(), hw.begin(), hw.end());
      return emit_check_report(results, out_dir, "tails");
    }
    if (heavy->parsed()) {
      auto results = fpaudit::check_heavy_tailed(seed, workers);
      return emit_check_report(results, out_dir, "heavy-tailed");
    }
    if (phase->parsed()) {
      return cmd_phase_diagram(cfg, out_dir, svg);
    }
    std::cerr << "no command selected\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
