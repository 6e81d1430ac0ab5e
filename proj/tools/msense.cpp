// Command line front end: loads a scenario config, runs the requested
// analysis, and drops CSV plus a JSON manifest into the output directory so
// any run can be reproduced from its recorded inputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "msense/chemfield.hpp"
#include "msense/continuum.hpp"
#include "msense/hydro.hpp"
#include "msense/montecarlo.hpp"
#include "msense/params.hpp"
#include "msense/poisson.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "scenario config file (defaults apply when omitted)")
      ->envname("MSENSE_CONFIG");
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed for trial streams")->capture_default_str();
}

msense::Scenario load_scenario(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  msense::Scenario s = msense::load_config(buf.str());
  std::vector<std::string> broken = msense::validate(s.params);
  if (!broken.empty()) {
    std::string msg = "config violates:";
    for (const std::string& rule : broken) msg += " [" + rule + "]";
    throw std::invalid_argument(msg);
  }
  return s;
}

int parse_count(const std::string& text) {
  char* end = nullptr;
  long v = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || v < 1 || v > 1000000)
    throw std::invalid_argument("bad threshold '" + text + "'");
  return static_cast<int>(v);
}

// "A..B" inclusive range, or a comma list, or a single integer.
std::vector<int> parse_thresholds(const std::string& text) {
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    int a = parse_count(text.substr(0, dots));
    int b = parse_count(text.substr(dots + 2));
    if (b < a) throw std::invalid_argument("threshold range is reversed: " + text);
    for (int e = a; e <= b; ++e) out.push_back(e);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_count(item));
  }
  if (out.empty()) throw std::invalid_argument("empty threshold list");
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Gathers output files and manifest fields for one subcommand run.
class RunLog {
 public:
  RunLog(std::string subcommand, const CommonOpts& o, const msense::Scenario& s)
      : sub_(std::move(subcommand)), out_dir_(o.out_dir), start_(clock_type::now()) {
    manifest_["subcommand"] = sub_;
    manifest_["seed"] = o.seed;
    manifest_["config_path"] = o.config_path;
    manifest_["config"] = msense::config_text(s);
    manifest_["outputs"] = nlohmann::json::array();
    fs::create_directories(out_dir_);
  }

  void option(const std::string& key, const nlohmann::json& value) {
    manifest_["options"][key] = value;
  }

  std::ofstream csv(const std::string& name, const std::string& header) {
    fs::path path = fs::path(out_dir_) / name;
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out << header << '\n';
    manifest_["outputs"].push_back(name);
    return out;
  }

  void finish() {
    using seconds = std::chrono::duration<double>;
    manifest_["duration_s"] = seconds(clock_type::now() - start_).count();
    fs::path path = fs::path(out_dir_) / (sub_ + "_manifest.json");
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out << manifest_.dump(2) << '\n';
    std::cout << "wrote " << path.string();
    for (const auto& name : manifest_["outputs"])
      std::cout << ", " << (fs::path(out_dir_) / name.get<std::string>()).string();
    std::cout << '\n';
  }

 private:
  using clock_type = std::chrono::steady_clock;

  std::string sub_;
  std::string out_dir_;
  clock_type::time_point start_;
  nlohmann::json manifest_;
};

int run_field(const CommonOpts& o) {
  msense::Scenario s = load_scenario(o.config_path);
  RunLog log("field", o, s);

  msense::ScalarField f = msense::solve_source_field(s.params, s.grid);
  std::ofstream out = log.csv("field.csv", "r_um,x_um,conc_per_um3");
  for (int i = 0; i < f.nr; ++i)
    for (int j = 0; j < f.nx; ++j)
      out << num(f.r_node(i)) << ',' << num(f.x_node(j)) << ',' << num(f.at(i, j)) << '\n';

  log.option("nodes_r", f.nr);
  log.option("nodes_x", f.nx);
  std::printf("field: %d x %d nodes, peak wall concentration %.4g per um^3, mass residual %.2g\n",
              f.nr, f.nx, msense::peak_wall_concentration(f, s.params),
              msense::mass_balance_residual(f, s.params));
  log.finish();
  return 0;
}

int run_rates(const CommonOpts& o, const std::string& thresholds_text) {
  msense::Scenario s = load_scenario(o.config_path);
  RunLog log("rates", o, s);
  std::vector<int> thresholds = parse_thresholds(thresholds_text);
  log.option("thresholds", thresholds);

  msense::ScalarField f = msense::solve_source_field(s.params, s.grid);
  std::vector<msense::DetectionRates> sweep =
      msense::detection_rate_sweep(f, s.params, thresholds);

  std::ofstream out =
      log.csv("rates.csv", "threshold,sigma_source_per_s,sigma_background_per_s");
  for (const auto& row : sweep)
    out << row.threshold << ',' << num(row.sigma_source_per_s) << ','
        << num(row.sigma_background_per_s) << '\n';

  double entry = msense::vessel_entry_rate(s.params);
  int usable_lo = 0, usable_hi = 0;
  for (const auto& row : sweep) {
    bool usable = row.sigma_source_per_s > 10.0 * row.sigma_background_per_s &&
                  row.sigma_source_per_s > 0.5 * entry;
    if (!usable) continue;
    if (usable_lo == 0) usable_lo = row.threshold;
    usable_hi = row.threshold;
  }
  if (usable_lo > 0)
    std::printf("rates: source rate clears 10x background on thresholds %d..%d\n", usable_lo,
                usable_hi);
  else
    std::printf("rates: no threshold separates source from background\n");
  log.finish();
  return 0;
}

int run_roc(const CommonOpts& o, const std::string& thresholds_text, double task_time,
            int required, int false_required) {
  msense::Scenario s = load_scenario(o.config_path);
  if (task_time > 0.0) s.params.task_time_s = task_time;
  if (required > 0) s.params.required_detections = required;
  RunLog log("roc", o, s);
  std::vector<int> thresholds = parse_thresholds(thresholds_text);
  log.option("thresholds", thresholds);
  log.option("task_time_s", s.params.task_time_s);
  log.option("required_detections", s.params.required_detections);
  log.option("false_required", false_required);

  msense::ScalarField f = msense::solve_source_field(s.params, s.grid);
  std::vector<msense::RocPoint> roc =
      msense::mission_roc(f, s.params, thresholds, {}, false_required);

  std::ofstream out = log.csv("roc.csv", "threshold,p_true,p_false");
  for (const auto& pt : roc)
    out << pt.threshold << ',' << num(pt.p_true) << ',' << num(pt.p_false) << '\n';

  const msense::RocPoint* best = nullptr;
  for (const auto& pt : roc)
    if (pt.p_false < 0.1 && (best == nullptr || pt.p_true > best->p_true)) best = &pt;
  if (best != nullptr)
    std::printf("roc: best operating point at threshold %d: p_true %.4g, p_false %.4g\n",
                best->threshold, best->p_true, best->p_false);
  else
    std::printf("roc: no threshold keeps p_false below 0.1\n");
  log.finish();
  return 0;
}

int run_simulate(const CommonOpts& o, std::string thresholds_text, std::uint64_t trials,
                 int threads, double dt, bool brownian, bool no_source) {
  msense::Scenario s = load_scenario(o.config_path);
  if (thresholds_text.empty()) thresholds_text = std::to_string(s.params.count_threshold);
  RunLog log("simulate", o, s);
  std::vector<int> thresholds = parse_thresholds(thresholds_text);
  log.option("thresholds", thresholds);
  log.option("trials", trials);
  log.option("dt_s", dt);
  log.option("brownian", brownian);
  log.option("with_source", !no_source);

  msense::TrialConfig cfg;
  cfg.n_trials = trials;
  cfg.master_seed = o.seed;
  cfg.dt_s = dt;
  cfg.with_source = !no_source;
  cfg.brownian = brownian;
  cfg.n_threads = threads;

  msense::ScalarField f;
  const msense::ScalarField* field = nullptr;
  if (!no_source) {
    f = msense::solve_source_field(s.params, s.grid);
    field = &f;
  }
  int max_e = *std::max_element(thresholds.begin(), thresholds.end());
  std::vector<std::uint64_t> detections = msense::detection_spectrum(field, s.params, cfg, max_e);

  std::ofstream out = log.csv("simulate.csv", "threshold,p_hat,ci_low,ci_high,n_trials,seed");
  for (int e : thresholds) {
    auto [lo, hi] = msense::wilson_interval(detections[e], trials);
    double p_hat = static_cast<double>(detections[e]) / static_cast<double>(trials);
    out << e << ',' << num(p_hat) << ',' << num(lo) << ',' << num(hi) << ',' << trials << ','
        << o.seed << '\n';
    std::printf("simulate: threshold %d: p_hat %.4g [%.4g, %.4g] over %llu trials\n", e, p_hat,
                lo, hi, static_cast<unsigned long long>(trials));
  }
  log.finish();
  return 0;
}

int run_compare(const CommonOpts& o, const std::string& thresholds_text,
                std::uint64_t source_trials, std::uint64_t background_trials, int threads,
                double dt) {
  msense::Scenario s = load_scenario(o.config_path);
  RunLog log("compare", o, s);
  std::vector<int> thresholds = parse_thresholds(thresholds_text);
  log.option("thresholds", thresholds);
  log.option("source_trials", source_trials);
  log.option("background_trials", background_trials);
  log.option("dt_s", dt);

  msense::CompareConfig cc;
  cc.source_trials = source_trials;
  cc.background_trials = background_trials;
  cc.master_seed = o.seed;
  cc.dt_s = dt;
  cc.n_threads = threads;

  msense::ScalarField f = msense::solve_source_field(s.params, s.grid);
  std::vector<msense::ComparisonRow> rows =
      msense::compare_with_continuum(f, s.params, thresholds, cc);

  std::ofstream out = log.csv(
      "compare.csv",
      "threshold,with_source,p_mc,ci_low,ci_high,p_analytic,ratio,analytic_in_ci");
  int misses = 0;
  for (const auto& row : rows) {
    out << row.threshold << ',' << (row.with_source ? 1 : 0) << ',' << num(row.p_mc) << ','
        << num(row.ci_low) << ',' << num(row.ci_high) << ',' << num(row.p_analytic) << ','
        << num(row.ratio) << ',' << (row.analytic_in_ci ? 1 : 0) << '\n';
    if (!row.analytic_in_ci) ++misses;
  }
  std::printf("compare: %zu rows, analytic value outside the interval on %d\n", rows.size(),
              misses);
  log.finish();
  return 0;
}

int run_report(const CommonOpts& o) {
  msense::Scenario s = load_scenario(o.config_path);
  RunLog log("report", o, s);
  const msense::ScenarioParams& p = s.params;

  msense::ScalarField f = msense::solve_source_field(p, s.grid);
  std::vector<int> thresholds;
  for (int e = 1; e <= 20; ++e) thresholds.push_back(e);
  std::vector<msense::RocPoint> roc = msense::mission_roc(f, p, thresholds);
  const msense::RocPoint* best = nullptr;
  for (const auto& pt : roc)
    if (pt.p_false < 0.1 && (best == nullptr || pt.p_true > best->p_true)) best = &pt;

  msense::BloodSampleComparison blood = msense::blood_sample_comparison(p, 86400.0, 5.0);

  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> table;
  auto row = [&table](const std::string& name, const std::string& ref, const std::string& got) {
    table.push_back({name, {ref, got}});
  };
  row("robot entry rate per vessel [1/s]", "0.016", num(msense::vessel_entry_rate(p)));
  row("fleet entry rate [1/s]", "8e3", num(msense::tissue_entry_rate(p)));
  row("background counts per window", "0.08", num(msense::background_counts(p)));
  row("background capture rate [1/s]", "8", num(msense::background_capture_rate(p)));
  row("capture rate at source concentration [1/s]", "2300",
      num(msense::capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                               p.source_concentration_per_um3)));
  row("source production rate [molecules/s]", "5e4", num(p.source_production_per_s()));
  row("robot Reynolds number", "1e-3",
      num(msense::reynolds_number(p.robot_radius_um, p.avg_velocity_um_s, p.fluid_density_g_cm3,
                                  p.viscosity_g_cm_s)));
  row("peak wall concentration [molecules/um^3]", "1.8",
      num(msense::peak_wall_concentration(f, p)));
  row("field mass balance residual", "-", num(msense::mass_balance_residual(f, p)));
  if (best != nullptr) {
    row("best mission threshold (1000 s task)", "~10", std::to_string(best->threshold));
    row("p_true at best threshold", "> 0.9", num(best->p_true));
    row("p_false at best threshold", "< 0.1", num(best->p_false));
  }
  row("one-day blood sample to background ratio", "1e-4", num(blood.ratio_to_background));

  std::ofstream out = log.csv("report.csv", "quantity,reference,computed");
  std::printf("%-46s %14s %16s\n", "quantity", "reference", "computed");
  for (const auto& [name, cols] : table) {
    out << name << ',' << cols.first << ',' << cols.second << '\n';
    std::printf("%-46s %14s %16s\n", name.c_str(), cols.first.c_str(), cols.second.c_str());
  }
  log.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"passive chemical sensing in small vessels: field, rate, and trial analyses"};
  app.require_subcommand(1);

  CommonOpts field_o;
  CLI::App* field_cmd = app.add_subcommand("field", "solve and export the concentration field");
  add_common(field_cmd, field_o);

  CommonOpts rates_o;
  std::string rates_thresholds = "1..20";
  CLI::App* rates_cmd =
      app.add_subcommand("rates", "fleet detection rates per count threshold");
  add_common(rates_cmd, rates_o);
  rates_cmd->add_option("--thresholds", rates_thresholds, "A..B range, comma list, or single")
      ->capture_default_str();

  CommonOpts roc_o;
  std::string roc_thresholds = "1..20";
  double roc_task_time = 0.0;
  int roc_required = 0;
  int roc_false_required = 1;
  CLI::App* roc_cmd = app.add_subcommand("roc", "mission operating points per threshold");
  add_common(roc_cmd, roc_o);
  roc_cmd->add_option("--thresholds", roc_thresholds, "A..B range, comma list, or single")
      ->capture_default_str();
  roc_cmd->add_option("--task-time", roc_task_time, "mission duration [s] (overrides config)");
  roc_cmd->add_option("--required", roc_required,
                      "detections required for a true positive (overrides config)");
  roc_cmd->add_option("--false-required", roc_false_required,
                      "detections counted as a false positive")
      ->capture_default_str();

  CommonOpts sim_o;
  std::string sim_thresholds;
  std::uint64_t sim_trials = 10000;
  int sim_threads = 0;
  double sim_dt = 1e-4;
  bool sim_brownian = false;
  bool sim_no_source = false;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "trial-based detection probabilities");
  add_common(sim_cmd, sim_o);
  sim_cmd->add_option("--thresholds", sim_thresholds,
                      "A..B range, comma list, or single (default: config threshold)");
  sim_cmd->add_option("--trials", sim_trials, "number of transits")->capture_default_str();
  sim_cmd->add_option("--threads", sim_threads, "worker threads (0: all)")->capture_default_str();
  sim_cmd->add_option("--dt", sim_dt, "time bin [s]")->capture_default_str();
  sim_cmd->add_flag("--brownian", sim_brownian, "add radial Brownian steps");
  sim_cmd->add_flag("--no-source", sim_no_source, "background-only vessel");

  CommonOpts cmp_o;
  std::string cmp_thresholds = "1..20";
  std::uint64_t cmp_source_trials = 100000;
  std::uint64_t cmp_background_trials = 10000000;
  int cmp_threads = 0;
  double cmp_dt = 1e-4;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "trial versus streamline-model detection probabilities");
  add_common(cmp_cmd, cmp_o);
  cmp_cmd->add_option("--thresholds", cmp_thresholds, "A..B range, comma list, or single")
      ->capture_default_str();
  cmp_cmd->add_option("--source-trials", cmp_source_trials, "transits past the source")
      ->capture_default_str();
  cmp_cmd->add_option("--background-trials", cmp_background_trials, "clean-vessel transits")
      ->capture_default_str();
  cmp_cmd->add_option("--threads", cmp_threads, "worker threads (0: all)")->capture_default_str();
  cmp_cmd->add_option("--dt", cmp_dt, "time bin [s]")->capture_default_str();

  CommonOpts report_o;
  CLI::App* report_cmd =
      app.add_subcommand("report", "headline numbers against their published references");
  add_common(report_cmd, report_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (field_cmd->parsed()) return run_field(field_o);
    if (rates_cmd->parsed()) return run_rates(rates_o, rates_thresholds);
    if (roc_cmd->parsed())
      return run_roc(roc_o, roc_thresholds, roc_task_time, roc_required, roc_false_required);
    if (sim_cmd->parsed())
      return run_simulate(sim_o, sim_thresholds, sim_trials, sim_threads, sim_dt, sim_brownian,
                          sim_no_source);
    if (cmp_cmd->parsed())
      return run_compare(cmp_o, cmp_thresholds, cmp_source_trials, cmp_background_trials,
                         cmp_threads, cmp_dt);
    if (report_cmd->parsed()) return run_report(report_o);
  } catch (const msense::SolveError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const msense::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
