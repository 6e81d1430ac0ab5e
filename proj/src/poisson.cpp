#include "msense/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace msense {

double capture_rate(double diffusion_um2_s, double robot_radius_um, double conc_per_um3) {
  return 4.0 * std::numbers::pi * diffusion_um2_s * robot_radius_um * conc_per_um3;
}

double background_capture_rate(const ScenarioParams& p) {
  return capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                      p.background_concentration_per_um3);
}

double poisson_pmf(double mean, int n) {
  if (n < 0) throw std::invalid_argument("poisson_pmf: negative count");
  if (mean < 0) throw std::invalid_argument("poisson_pmf: negative mean");
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

double tail_prob(double mean, int at_least) {
  if (mean < 0) throw std::invalid_argument("tail_prob: negative mean");
  if (at_least <= 0) return 1.0;
  if (mean == 0.0) return 0.0;

  int e = at_least;
  if (e - 1 <= mean) {
    // mass below the threshold is the smaller piece; sum it downward
    double term = poisson_pmf(mean, e - 1);
    double below = term;
    for (int n = e - 1; n > 0; --n) {
      term *= n / mean;
      below += term;
      if (term < below * 1e-17) break;
    }
    return std::clamp(1.0 - below, 0.0, 1.0);
  }
  // otherwise the tail itself converges geometrically
  double term = poisson_pmf(mean, e);
  double tail = term;
  for (int n = e; term > tail * 1e-17 && term > 0.0; ++n) {
    term *= mean / (n + 1);
    tail += term;
  }
  return std::clamp(tail, 0.0, 1.0);
}

double background_counts(const ScenarioParams& p) {
  return background_capture_rate(p) * p.measure_time_s;
}

double expected_counts(const ScalarField& f, Position pos, const ScenarioParams& p,
                       double max_step_s) {
  double reach = p.vessel_radius_um - p.robot_radius_um;
  if (pos.r_um < 0.0 || pos.r_um > reach + 1e-12)
    throw std::domain_error("expected_counts: robot center outside [0, R - a]");
  if (max_step_s <= 0.0) throw std::invalid_argument("expected_counts: step must be positive");

  int n = std::max(1, static_cast<int>(std::ceil(p.measure_time_s / max_step_s - 1e-12)));
  double dt = p.measure_time_s / n;
  double v = velocity_profile(pos.r_um, p);

  double sum = 0.0;
  for (int s = 0; s <= n; ++s) {
    double c = source_concentration_or_zero(f, {pos.r_um, pos.x_um - v * (s * dt)});
    sum += (s == 0 || s == n) ? 0.5 * c : c;
  }
  return capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um, 1.0) * sum * dt;
}

CountModel count_model_at(const ScalarField& f, Position pos, const ScenarioParams& p) {
  return CountModel{expected_counts(f, pos, p), background_counts(p), p.measure_time_s,
                    p.count_threshold};
}

double detection_hazard(double conc_here_per_um3, double source_counts, const ScenarioParams& p) {
  double rate = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                             conc_here_per_um3 + p.background_concentration_per_um3);
  int e = p.count_threshold;
  if (e <= 1) return rate;

  double mu = source_counts + background_counts(p);
  if (mu <= 0.0) return 0.0;

  // Po(mu, e-1) / sum_{n<e} Po(mu, n), written relative to the top term so
  // no factor under- or overflows before the division
  double rel = 1.0, sum = 1.0;
  for (int m = 1; m < e; ++m) {
    rel *= (e - m) / mu;
    sum += rel;
    if (rel > 1e300) return 0.0;       // window mean so small the ratio vanishes
    if (rel < sum * 1e-17) break;
  }
  return rate / sum;
}

}  // namespace msense
