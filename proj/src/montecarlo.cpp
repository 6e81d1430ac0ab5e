#include "msense/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "msense/poisson.hpp"
#include "msense/rng.hpp"

namespace msense {

namespace {

void check_config(const ScalarField* field, const ScenarioParams& p, const TrialConfig& cfg) {
  if (cfg.with_source != (field != nullptr))
    throw std::invalid_argument("trials: supply the solved field exactly for source runs");
  if (!(cfg.dt_s > 0.0) || cfg.dt_s > p.measure_time_s / 10.0 * (1.0 + 1e-12))
    throw std::invalid_argument("trials: bin must be positive and at most a tenth of the window");
  if (cfg.entry_radius_um) {
    double reach = p.vessel_radius_um - p.robot_radius_um;
    if (!(*cfg.entry_radius_um >= 0.0 && *cfg.entry_radius_um <= reach))
      throw std::invalid_argument("trials: pinned entry radius outside [0, R-a]");
  }
}

// Entry radius with probability proportional to the volume flux v(r)*r,
// inverted in closed form: the flux CDF is quadratic in r^2.
double sample_entry_radius(RandomStream& rng, const ScenarioParams& p, double reach) {
  double R2 = p.vessel_radius_um * p.vessel_radius_um;
  double q = rng.uniform() * (0.5 * reach * reach - 0.25 * reach * reach * reach * reach / R2);
  double s = R2 * (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * q / R2)));
  return std::sqrt(std::max(0.0, s));
}

// One robot transit.  Counting stops (and the walk ends) once the trailing
// window reaches stop_threshold; pass INT_MAX to observe the whole transit.
TransitOutcome run_transit(const ScalarField* field, const ScenarioParams& p,
                           const TrialConfig& cfg, std::uint64_t trial_index,
                           int stop_threshold) {
  RandomStream rng(cfg.master_seed, trial_index);

  TransitOutcome out;
  double reach = p.vessel_radius_um - p.robot_radius_um;
  double r = cfg.entry_radius_um ? *cfg.entry_radius_um : sample_entry_radius(rng, p, reach);
  out.entry_radius_um = r;

  double kappa = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um, 1.0);
  double bg_rate = kappa * p.background_concentration_per_um3;
  double dt = cfg.dt_s;
  double level_full_bin = std::exp(-bg_rate * dt);

  int window = static_cast<int>(std::ceil(p.measure_time_s / dt - 1e-9));
  std::vector<int> bins(window, 0);
  int head = 0;
  int sum = 0;

  double x0 = field ? field->grid.x_min_um : 0.0;
  double x_end = x0 + p.vessel_length_um;
  double x = x0;
  double t = 0.0;
  double v = velocity_profile(r, p);

  while (x < x_end - 1e-9 * p.vessel_length_um) {
    double bin_dt = std::min(dt, (x_end - x) / v);
    int count;
    if (field) {
      double conc = source_concentration_or_zero(*field, {r, x + 0.5 * v * bin_dt});
      count = rng.poisson((kappa * conc + bg_rate) * bin_dt);
    } else {
      count = bin_dt == dt ? rng.poisson_from_level(level_full_bin)
                           : rng.poisson(bg_rate * bin_dt);
    }
    sum += count - bins[head];
    bins[head] = count;
    if (++head == window) head = 0;
    x += v * bin_dt;
    t += bin_dt;
    if (count > 0) {
      out.total_counts += count;
      if (sum > out.max_window_count) out.max_window_count = sum;
      if (sum >= stop_threshold) {
        out.detected = true;
        out.first_detection = {r, x - 0.5 * v * bin_dt};
        out.detect_time_s = t;
        break;
      }
    }
    if (cfg.brownian) {
      r += rng.normal() * std::sqrt(2.0 * p.robot_diffusion_um2_s * bin_dt);
      while (r < 0.0 || r > reach) r = r < 0.0 ? -r : 2.0 * reach - r;
      v = velocity_profile(r, p);
    }
  }
  out.exit_radius_um = r;
  out.transit_time_s = t;
  return out;
}

int worker_count(std::uint64_t n_trials, int requested) {
  int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (static_cast<std::uint64_t>(workers) > n_trials) workers = static_cast<int>(n_trials);
  return workers;
}

// Contiguous trial ranges per worker; fn(worker, trial_index) must only
// touch its own worker slot so the reduction stays deterministic.
void for_each_trial(std::uint64_t n_trials, int workers,
                    const std::function<void(int, std::uint64_t)>& fn) {
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n_trials; ++i) fn(0, i);
    return;
  }
  std::uint64_t chunk = (n_trials + workers - 1) / workers;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    std::uint64_t lo = w * chunk;
    std::uint64_t hi = std::min(n_trials, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, w, lo, hi] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(w, i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

TransitOutcome simulate_transit(const ScalarField* field, const ScenarioParams& p,
                                const TrialConfig& cfg, std::uint64_t trial_index) {
  check_config(field, p, cfg);
  return run_transit(field, p, cfg, trial_index, p.count_threshold);
}

TrialEstimate estimate_detection_prob(const ScalarField* field, const ScenarioParams& p,
                                      const TrialConfig& cfg) {
  check_config(field, p, cfg);
  if (cfg.n_trials < 1) throw std::invalid_argument("trials: need at least one trial");

  int workers = worker_count(cfg.n_trials, cfg.n_threads);
  std::vector<std::uint64_t> hits(workers, 0);
  for_each_trial(cfg.n_trials, workers, [&](int w, std::uint64_t i) {
    if (run_transit(field, p, cfg, i, p.count_threshold).detected) ++hits[w];
  });
  std::uint64_t detections = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});

  TrialEstimate est;
  est.p_hat = static_cast<double>(detections) / static_cast<double>(cfg.n_trials);
  std::tie(est.ci_low, est.ci_high) = wilson_interval(detections, cfg.n_trials);
  est.n_trials = cfg.n_trials;
  est.n_detections = detections;
  est.master_seed = cfg.master_seed;
  return est;
}

std::vector<std::uint64_t> detection_spectrum(const ScalarField* field, const ScenarioParams& p,
                                              const TrialConfig& cfg, int max_threshold) {
  check_config(field, p, cfg);
  if (cfg.n_trials < 1) throw std::invalid_argument("trials: need at least one trial");
  if (max_threshold < 1) throw std::invalid_argument("trials: spectrum needs a threshold ceiling");

  int workers = worker_count(cfg.n_trials, cfg.n_threads);
  std::vector<std::vector<std::uint64_t>> peaks(
      workers, std::vector<std::uint64_t>(max_threshold + 1, 0));
  for_each_trial(cfg.n_trials, workers, [&](int w, std::uint64_t i) {
    TransitOutcome out = run_transit(field, p, cfg, i, std::numeric_limits<int>::max());
    ++peaks[w][std::min(out.max_window_count, max_threshold)];
  });

  std::vector<std::uint64_t> at_least(max_threshold + 1, 0);
  for (const auto& hist : peaks)
    for (int e = 0; e <= max_threshold; ++e) at_least[e] += hist[e];
  for (int e = max_threshold - 1; e >= 0; --e) at_least[e] += at_least[e + 1];
  return at_least;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("wilson interval: no trials");
  if (successes > trials) throw std::invalid_argument("wilson interval: successes exceed trials");
  constexpr double z = 1.9599639845400545;  // two-sided 95%
  double n = static_cast<double>(trials);
  double p_hat = static_cast<double>(successes) / n;
  double z2n = z * z / n;
  double denom = 1.0 + z2n;
  double center = (p_hat + 0.5 * z2n) / denom;
  double half = z * std::sqrt(p_hat * (1.0 - p_hat) / n + 0.25 * z2n / n) / denom;
  // the score interval is exact at the extremes; pin them against roundoff
  double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

std::vector<ComparisonRow> compare_with_continuum(const ScalarField& field,
                                                  const ScenarioParams& p,
                                                  const std::vector<int>& thresholds,
                                                  const CompareConfig& cc) {
  std::vector<ComparisonRow> rows;
  if (thresholds.empty()) return rows;
  for (int e : thresholds)
    if (e < 1) throw std::invalid_argument("comparison: threshold below 1");
  int max_e = *std::max_element(thresholds.begin(), thresholds.end());

  std::vector<double> analytic_src = transit_probabilities(&field, p, thresholds, true, cc.quad);
  std::vector<double> analytic_bg = transit_probabilities(nullptr, p, thresholds, false, cc.quad);

  TrialConfig src_cfg;
  src_cfg.n_trials = cc.source_trials;
  src_cfg.master_seed = cc.master_seed;
  src_cfg.dt_s = cc.dt_s;
  src_cfg.with_source = true;
  src_cfg.n_threads = cc.n_threads;
  std::vector<std::uint64_t> src_counts = detection_spectrum(&field, p, src_cfg, max_e);

  TrialConfig bg_cfg = src_cfg;
  bg_cfg.n_trials = cc.background_trials;
  bg_cfg.master_seed = cc.master_seed + 1;  // keep the two batches on disjoint streams
  bg_cfg.with_source = false;
  std::vector<std::uint64_t> bg_counts = detection_spectrum(nullptr, p, bg_cfg, max_e);

  auto emit = [&rows](bool with_source, int threshold, std::uint64_t hits, std::uint64_t n,
                      double analytic) {
    ComparisonRow row;
    row.threshold = threshold;
    row.with_source = with_source;
    row.p_mc = static_cast<double>(hits) / static_cast<double>(n);
    std::tie(row.ci_low, row.ci_high) = wilson_interval(hits, n);
    row.p_analytic = analytic;
    row.ratio = analytic > 0.0 ? row.p_mc / analytic : std::numeric_limits<double>::quiet_NaN();
    row.analytic_in_ci = analytic >= row.ci_low && analytic <= row.ci_high;
    rows.push_back(row);
  };
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    emit(true, thresholds[i], src_counts[thresholds[i]], cc.source_trials, analytic_src[i]);
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    emit(false, thresholds[i], bg_counts[thresholds[i]], cc.background_trials, analytic_bg[i]);
  return rows;
}

}  // namespace msense
