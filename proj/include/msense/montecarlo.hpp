#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "msense/chemfield.hpp"
#include "msense/continuum.hpp"
#include "msense/hydro.hpp"
#include "msense/params.hpp"

// Discrete-event check on the transit averages: walk single robots through
// the vessel, draw their chemical captures bin by bin, and apply the exact
// trailing-window count rule that the hazard-rate model only approximates.

namespace msense {

/// Settings for one batch of independent robot transits.
struct TrialConfig {
  std::uint64_t n_trials = 10000;
  std::uint64_t master_seed = 1;
  double dt_s = 1e-4;        // time bin; must stay at or below T_measure/10
  bool with_source = true;   // false: clean vessel, background captures only
  bool brownian = false;     // add reflected radial Brownian steps
  int n_threads = 0;         // 0: use every hardware thread
  std::optional<double> entry_radius_um;  // pin the entry streamline (tests)
};

/// What happened during a single simulated transit.
struct TransitOutcome {
  bool detected = false;
  Position first_detection{0.0, 0.0};  // valid only when detected
  double detect_time_s = 0.0;          // end of the bin that filled the window
  double entry_radius_um = 0.0;
  double exit_radius_um = 0.0;
  double transit_time_s = 0.0;  // walked time; detection cuts the walk short
  std::uint64_t total_counts = 0;  // captures up to detection or exit
  int max_window_count = 0;        // largest trailing-window sum seen
};

/// Detection probability estimate with a Wilson 95% interval.
struct TrialEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t n_detections = 0;
  std::uint64_t master_seed = 0;
};

/// One row of the trial-versus-transit-model comparison table.
struct ComparisonRow {
  int threshold = 0;
  bool with_source = true;
  double p_mc = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_analytic = 0.0;
  double ratio = 0.0;  // p_mc / p_analytic; NaN when the analytic value is 0
  bool analytic_in_ci = false;
};

/// Batch sizes and seeds for compare_with_continuum.  Background runs need
/// far more trials because their detection probabilities sit near zero.
struct CompareConfig {
  std::uint64_t source_trials = 100000;
  std::uint64_t background_trials = 10000000;
  std::uint64_t master_seed = 1;
  double dt_s = 1e-4;
  int n_threads = 0;
  TransitQuadrature quad{};
};

/// Walk one robot down the vessel and apply the windowed count rule.
/// The field must be present exactly when cfg.with_source is set; entry
/// radius is drawn flux-weighted on [0, R-a] unless pinned.  Deterministic
/// given (master_seed, trial_index).
TransitOutcome simulate_transit(const ScalarField* field, const ScenarioParams& p,
                                const TrialConfig& cfg, std::uint64_t trial_index);

/// Detection probability for p.count_threshold over cfg.n_trials transits.
/// The tally is reduced over trial indices, so any thread count gives
/// bit-identical results.
TrialEstimate estimate_detection_prob(const ScalarField* field, const ScenarioParams& p,
                                      const TrialConfig& cfg);

/// Detections for every threshold 1..max_threshold from one batch: entry e
/// counts trials whose peak window sum reached e (entry 0 holds n_trials).
/// Trials never stop early, so entry e matches what per-threshold
/// stop-at-detection runs with the same seed would count.
std::vector<std::uint64_t> detection_spectrum(const ScalarField* field, const ScenarioParams& p,
                                              const TrialConfig& cfg, int max_threshold);

/// Wilson 95% score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// Run trials and the streamline average on identical parameters, for the
/// requested thresholds, with and without the source; flag rows where the
/// analytic value escapes the Monte Carlo interval.
std::vector<ComparisonRow> compare_with_continuum(const ScalarField& field,
                                                  const ScenarioParams& p,
                                                  const std::vector<int>& thresholds,
                                                  const CompareConfig& cc = {});

}  // namespace msense
