#include "msense/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "msense/hydro.hpp"

namespace msense {

namespace {

constexpr double kPi = std::numbers::pi;

// Survival exponents (integral of the alarm hazard over one transit) for a
// single entry radius, one value per requested threshold.
void transit_hazard_integrals(const ScalarField* field, const ScenarioParams& p,
                              const std::vector<int>& thresholds, bool with_source, double r,
                              const TransitQuadrature& quad, std::vector<double>& out) {
  double v = velocity_profile(r, p);
  double transit = p.vessel_length_um / v;

  if (!with_source) {
    // clean fluid: the hazard is the same everywhere on the path
    for (size_t t = 0; t < thresholds.size(); ++t) {
      ScenarioParams pt = p;
      pt.count_threshold = thresholds[t];
      out[t] = detection_hazard(0.0, 0.0, pt) * transit;
    }
    return;
  }

  // step chosen so one counting window is a whole number of steps
  int win = std::max(1, static_cast<int>(std::round(p.measure_time_s / quad.path_step_s)));
  double dt = p.measure_time_s / win;
  int m = static_cast<int>(transit / dt);  // full steps; the remainder is handled last
  double x0 = field->grid.x_min_um;
  double kappa = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um, 1.0);

  // concentration along the path and the windowed exposure K behind each step
  std::vector<double> conc(m + 1), window_k(m + 1), prefix(m + 1);
  for (int s = 0; s <= m; ++s)
    conc[s] = source_concentration_or_zero(*field, {r, x0 + v * (s * dt)});
  prefix[0] = 0.0;
  for (int s = 1; s <= m; ++s) prefix[s] = prefix[s - 1] + 0.5 * (conc[s - 1] + conc[s]) * dt;
  for (int s = 0; s <= m; ++s) {
    double past = (s >= win) ? prefix[s - win] : 0.0;  // pre-entry fluid was clean
    window_k[s] = kappa * (prefix[s] - past);
  }

  double tail_t = transit - m * dt;
  double tail_c = source_concentration_or_zero(*field, {r, x0 + v * transit});

  for (size_t t = 0; t < thresholds.size(); ++t) {
    ScenarioParams pt = p;
    pt.count_threshold = thresholds[t];
    double h = 0.0;
    double prev = detection_hazard(conc[0], window_k[0], pt);
    for (int s = 1; s <= m; ++s) {
      double cur = detection_hazard(conc[s], window_k[s], pt);
      h += 0.5 * (prev + cur) * dt;
      prev = cur;
    }
    h += 0.5 * (prev + detection_hazard(tail_c, window_k[m], pt)) * tail_t;
    out[t] = h;
  }
}

}  // namespace

// Flux-weighted transit detection probability for each threshold.
std::vector<double> transit_probabilities(const ScalarField* field, const ScenarioParams& p,
                                          const std::vector<int>& thresholds, bool with_source,
                                          const TransitQuadrature& quad) {
  if (with_source && field == nullptr)
    throw std::invalid_argument("transit probabilities: a source run needs the solved field");
  if (quad.n_streamlines < 1 || quad.path_step_s <= 0.0)
    throw std::invalid_argument("transit probabilities: bad quadrature settings");
  for (int e : thresholds)
    if (e < 1) throw std::invalid_argument("transit probabilities: threshold below 1");

  double reach = p.vessel_radius_um - p.robot_radius_um;
  int n = quad.n_streamlines;

  std::vector<double> acc(thresholds.size(), 0.0);
  std::vector<double> h(thresholds.size());
  double weight_sum = 0.0;
  for (int q = 0; q < n; ++q) {
    double r = (q + 0.5) * reach / n;
    double w = velocity_profile(r, p) * r;  // flux weight, constant factors cancel
    transit_hazard_integrals(field, p, thresholds, with_source, r, quad, h);
    for (size_t t = 0; t < thresholds.size(); ++t) acc[t] += w * (1.0 - std::exp(-h[t]));
    weight_sum += w;
  }
  for (double& a : acc) a /= weight_sum;
  return acc;
}

double vessel_entry_rate(const ScenarioParams& p) {
  return p.robot_density_per_um3() * kPi * p.vessel_radius_um * p.vessel_radius_um *
         p.avg_velocity_um_s;
}

double tissue_entry_rate(const ScenarioParams& p) { return p.vessel_count() * vessel_entry_rate(p); }

double per_robot_detection_prob(const ScalarField* field, const ScenarioParams& p,
                                bool with_source, const TransitQuadrature& quad) {
  return transit_probabilities(field, p, {p.count_threshold}, with_source, quad)[0];
}

double source_detection_rate(const ScalarField& field, const ScenarioParams& p,
                             const TransitQuadrature& quad) {
  return vessel_entry_rate(p) * per_robot_detection_prob(&field, p, true, quad);
}

double false_positive_rate(const ScenarioParams& p) {
  double windows_per_transit = p.vessel_length_um / (p.avg_velocity_um_s * p.measure_time_s);
  return windows_per_transit * tissue_entry_rate(p) *
         tail_prob(background_counts(p), p.count_threshold);
}

std::vector<DetectionRates> detection_rate_sweep(const ScalarField& field,
                                                 const ScenarioParams& p,
                                                 const std::vector<int>& thresholds,
                                                 const TransitQuadrature& quad) {
  std::vector<double> probs = transit_probabilities(&field, p, thresholds, true, quad);
  double entry = vessel_entry_rate(p);
  std::vector<DetectionRates> rates(thresholds.size());
  for (size_t t = 0; t < thresholds.size(); ++t) {
    ScenarioParams pt = p;
    pt.count_threshold = thresholds[t];
    rates[t] = {thresholds[t], entry * probs[t], false_positive_rate(pt)};
  }
  return rates;
}

std::vector<RocPoint> mission_roc(const ScalarField& field, const ScenarioParams& p,
                                  const std::vector<int>& thresholds,
                                  const TransitQuadrature& quad, int n_false) {
  if (n_false < 1) throw std::invalid_argument("mission_roc: n_false below 1");
  std::vector<DetectionRates> rates = detection_rate_sweep(field, p, thresholds, quad);
  std::vector<RocPoint> roc(rates.size());
  for (size_t t = 0; t < rates.size(); ++t) {
    double with_source = (rates[t].sigma_source_per_s + rates[t].sigma_background_per_s) *
                         p.task_time_s;
    double without = rates[t].sigma_background_per_s * p.task_time_s;
    roc[t] = {rates[t].threshold, tail_prob(with_source, p.required_detections),
              tail_prob(without, n_false)};
  }
  return roc;
}

BloodSampleComparison blood_sample_comparison(const ScenarioParams& p, double duration_s,
                                              double volume_liters) {
  if (duration_s < 0) throw std::invalid_argument("blood_sample_comparison: negative duration");
  if (volume_liters <= 0) throw std::invalid_argument("blood_sample_comparison: volume must be positive");

  double volume_m3 = volume_liters * 1e-3;
  double added_per_m3 = p.source_production_per_s() * duration_s / volume_m3;
  double background_per_m3 = p.background_concentration_per_um3 * 1e18;
  double ratio = background_per_m3 > 0 ? added_per_m3 / background_per_m3 : 0.0;
  return {added_per_m3, ratio};
}

}  // namespace msense
