#ifndef MSENSE_POISSON_HPP
#define MSENSE_POISSON_HPP

#include "msense/chemfield.hpp"
#include "msense/hydro.hpp"
#include "msense/params.hpp"

namespace msense {

// Expected counts a robot accumulates over one counting window at a given
// spot, split by origin, plus the decision rule they feed.
struct CountModel {
  double source_counts = 0.0;      // K: from the wall source, path-history dependent
  double background_counts = 0.0;  // k: from the uniform background
  double measure_time_s = 0.0;
  int threshold = 1;
};

/// Diffusive capture rate of an absorbing sphere, 4 pi D a C, in counts/s.
double capture_rate(double diffusion_um2_s, double robot_radius_um, double conc_per_um3);

/// Capture rate from the uniform background alone.
double background_capture_rate(const ScenarioParams& p);

/// Poisson point probability, evaluated in log space so large n stays finite.
double poisson_pmf(double mean, int n);

/// Pr[N >= at_least] for N ~ Poisson(mean), summed from whichever side is
/// small so extreme tails keep relative accuracy.
double tail_prob(double mean, int at_least);

/// Expected background counts per counting window: k = 4 pi D a c T.
double background_counts(const ScenarioParams& p);

// Expected source counts K over the window ending now for a robot at pos:
// 4 pi D a times the time integral of concentration along the streamline the
// robot rode in on. Path segments outside the solved window contribute
// nothing. Composite trapezoid with step at most max_step_s.
// pos must be a reachable robot center: 0 <= r <= R - a.
double expected_counts(const ScalarField& f, Position pos, const ScenarioParams& p,
                       double max_step_s = 1e-4);

/// Bundles K and k at a position with the decision rule from params.
CountModel count_model_at(const ScalarField& f, Position pos, const ScenarioParams& p);

// Rate of first crossing the count threshold: capture rate at the local
// concentration times the probability that the window sits one count short,
// conditioned on not having crossed yet,
//   4 pi D a (C + c) * Po(K + k, E - 1) / sum_{n < E} Po(K + k, n).
// With threshold 1 this is exactly the capture rate.
double detection_hazard(double conc_here_per_um3, double source_counts, const ScenarioParams& p);

}  // namespace msense

#endif
