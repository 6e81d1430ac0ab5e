#ifndef MSENSE_CONTINUUM_HPP
#define MSENSE_CONTINUUM_HPP

#include <vector>

#include "msense/chemfield.hpp"
#include "msense/params.hpp"
#include "msense/poisson.hpp"

namespace msense {

// Per-threshold fleet detection rates: transits of the source vessel that
// alarm, and alarms anywhere in the monitored tissue with no source present.
struct DetectionRates {
  int threshold = 1;
  double sigma_source_per_s = 0.0;
  double sigma_background_per_s = 0.0;
};

// Mission-level operating point for one threshold choice.
struct RocPoint {
  int threshold = 1;
  double p_true = 0.0;
  double p_false = 0.0;
};

// Discretization of the transit average: streamlines across the entry disk
// and the time step used to march each one (chosen so a counting window is a
// whole number of steps).
struct TransitQuadrature {
  int n_streamlines = 512;
  double path_step_s = 1e-4;
};

/// Robots entering one vessel per second: rho_robot pi R^2 v_avg.
double vessel_entry_rate(const ScenarioParams& p);

/// Robots entering any monitored vessel per second.
double tissue_entry_rate(const ScenarioParams& p);

// Probability that a single transit of the vessel raises the alarm, averaged
// over entry radii with flux weights v(r) 2 pi r dr on 0 <= r <= R - a.
// Along each streamline the alarm hazard is integrated in time and survival
// decays as exp of minus the integral; the window history K comes from the
// concentration seen along the path, zero outside the solved grid. field may
// be null only when with_source is false.
double per_robot_detection_prob(const ScalarField* field, const ScenarioParams& p,
                                bool with_source, const TransitQuadrature& quad = {});

/// Same transit average evaluated for several thresholds over one set of
/// streamline paths; the threshold in params is ignored.
std::vector<double> transit_probabilities(const ScalarField* field, const ScenarioParams& p,
                                          const std::vector<int>& thresholds, bool with_source,
                                          const TransitQuadrature& quad = {});

/// Alarmed transits of the source vessel per second.
double source_detection_rate(const ScalarField& field, const ScenarioParams& p,
                             const TransitQuadrature& quad = {});

// False alarms per second across the whole fleet with no source anywhere:
// every transit offers L / (v_avg T_measure) independent windows, each
// tripping with probability tail_prob(k, threshold).
double false_positive_rate(const ScenarioParams& p);

/// Both rates for each threshold, sharing one set of streamline paths.
std::vector<DetectionRates> detection_rate_sweep(const ScalarField& field,
                                                 const ScenarioParams& p,
                                                 const std::vector<int>& thresholds,
                                                 const TransitQuadrature& quad = {});

// Mission operating points over the task horizon: p_true is the chance of
// accumulating the required detections with the source present, p_false the
// chance of n_false or more background alarms without it.
std::vector<RocPoint> mission_roc(const ScalarField& field, const ScenarioParams& p,
                                  const std::vector<int>& thresholds,
                                  const TransitQuadrature& quad = {}, int n_false = 1);

// What drawing blood instead would see: source output accumulated for a
// while, stirred into the whole blood volume.
struct BloodSampleComparison {
  double added_conc_per_m3 = 0.0;
  double ratio_to_background = 0.0;
};
BloodSampleComparison blood_sample_comparison(const ScenarioParams& p, double duration_s,
                                              double volume_liters);

}  // namespace msense

#endif
