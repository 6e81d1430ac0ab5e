#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msense/poisson.hpp"

using namespace msense;

namespace {

// independent oracle: forward series in extended precision, no shared code
// with the implementation's anchored two-sided summation
long double tail_oracle(long double mean, int at_least) {
  if (at_least <= 0) return 1.0L;
  long double term = std::exp(-mean);
  long double below = 0.0L;
  for (int n = 0; n < at_least; ++n) {
    below += term;
    term *= mean / (n + 1);
  }
  return 1.0L - below;
}

const ScalarField& default_field() {
  static ScalarField f = solve_source_field(default_params(), default_grid());
  return f;
}

ScalarField uniform_field(double value) {
  ScalarField f = default_field();
  std::fill(f.values.begin(), f.values.end(), value);
  return f;
}

}  // namespace

TEST_CASE("capture rates at the published concentrations") {
  ScenarioParams p = default_params();

  double at_source = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                                  p.source_concentration_per_um3);
  CHECK(at_source == doctest::Approx(720.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(at_source == doctest::Approx(2300.0).epsilon(0.02));

  double at_background = background_capture_rate(p);
  CHECK(at_background == doctest::Approx(2.4 * std::numbers::pi).epsilon(1e-12));
  CHECK(at_background == doctest::Approx(8.0).epsilon(0.07));

  CHECK(capture_rate(100.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("window background counts") {
  ScenarioParams p = default_params();
  CHECK(background_counts(p) == doctest::Approx(0.024 * std::numbers::pi).epsilon(1e-12));
  CHECK(background_counts(p) == doctest::Approx(0.08).epsilon(0.07));

  p.background_concentration_per_um3 = 0.0;
  CHECK(background_counts(p) == 0.0);
}

TEST_CASE("poisson pmf basics and normalization") {
  CHECK(poisson_pmf(0.08, 0) == doctest::Approx(std::exp(-0.08)).epsilon(1e-14));
  CHECK(poisson_pmf(0.0, 0) == 1.0);
  CHECK(poisson_pmf(0.0, 3) == 0.0);
  CHECK_THROWS_AS(poisson_pmf(1.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(poisson_pmf(-1.0, 1), std::invalid_argument);

  for (double mu : {0.05, 0.8, 3.0, 17.3, 50.0}) {
    double sum = 0.0;
    for (int n = 0; n < 400; ++n) sum += poisson_pmf(mu, n);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }

  // log-space evaluation survives far into the tail
  long double term = std::exp(-50.0L);
  for (int n = 0; n < 500; ++n) term *= 50.0L / (n + 1);
  CHECK(poisson_pmf(50.0, 500) == doctest::Approx(static_cast<double>(term)).epsilon(1e-11));
}

TEST_CASE("tail probability endpoints and published spot values") {
  CHECK(tail_prob(0.08, 0) == 1.0);
  CHECK(tail_prob(0.0, 3) == 0.0);
  CHECK(tail_prob(0.08, 1) == doctest::Approx(-std::expm1(-0.08)).epsilon(1e-12));
  CHECK(tail_prob(0.08, 2) == doctest::Approx(3.03e-3).epsilon(2e-3));
  CHECK_THROWS_AS(tail_prob(-0.5, 1), std::invalid_argument);
}

TEST_CASE("tail probability agrees with the series oracle") {
  for (double mu : {0.01, 0.08, 0.5, 1.0, 3.7, 10.0, 25.0, 50.0}) {
    for (int e = 1; e <= 100; ++e) {
      double got = tail_prob(mu, e);
      double want = static_cast<double>(tail_oracle(mu, e));
      CHECK(std::abs(got - want) <= 1e-10);
    }
  }
}

TEST_CASE("tail probability is monotone both ways") {
  for (double mu : {0.08, 2.0, 30.0}) {
    for (int e = 1; e < 60; ++e) CHECK(tail_prob(mu, e + 1) <= tail_prob(mu, e));
  }
  for (int e : {1, 5, 20}) {
    CHECK(tail_prob(1.0, e) <= tail_prob(2.0, e));
    CHECK(tail_prob(2.0, e) <= tail_prob(4.0, e));
  }
}

TEST_CASE("extreme tails keep relative precision") {
  // far tail: both routes use the direct small-piece sum, so values stay finite
  double far = tail_prob(0.0754, 10);
  CHECK(far > 1e-19);
  CHECK(far < 1e-17);
  CHECK(tail_prob(5.7e9, 1) == 1.0);
  // needing n far above the mean must not round to negative or above one
  double huge = tail_prob(1570.0, 1000);
  CHECK(huge == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expected window counts along the carried-in path") {
  ScenarioParams p = default_params();

  // no emission, no counts
  ScenarioParams p0 = p;
  p0.source_flux_per_um2_s = 0.0;
  ScalarField zero = solve_source_field(p0, default_grid());
  CHECK(expected_counts(zero, {2.0, 100.0}, p) == 0.0);

  // synthetic uniform concentration equal to the published plume level:
  // with the whole window inside the grid the quadrature is exact
  ScalarField flat = uniform_field(p.source_concentration_per_um3);
  double k_flat = expected_counts(flat, {2.0, 400.0}, p);
  double want = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                             p.source_concentration_per_um3) *
                p.measure_time_s;
  CHECK(k_flat == doctest::Approx(want).epsilon(1e-12));
  CHECK(k_flat == doctest::Approx(22.6).epsilon(2e-3));

  // entering robots have no upstream exposure
  CHECK(expected_counts(default_field(), {2.0, default_grid().x_min_um}, p) ==
        doctest::Approx(0.0).epsilon(1e-9));

  // robot centers cannot sit inside the wall
  CHECK_THROWS_AS(expected_counts(default_field(), {4.5, 100.0}, p), std::domain_error);
  CHECK_THROWS_AS(expected_counts(default_field(), {-0.1, 100.0}, p), std::domain_error);
}

TEST_CASE("halving the quadrature step moves K by well under half a percent") {
  ScenarioParams p = default_params();
  const ScalarField& f = default_field();
  for (Position pos : {Position{4.0, 20.0}, Position{3.0, 60.0}, Position{0.5, 200.0}}) {
    double coarse = expected_counts(f, pos, p, 1e-4);
    double fine = expected_counts(f, pos, p, 5e-5);
    CHECK(std::abs(fine - coarse) <= 5e-3 * std::max(fine, 1e-30));
  }
}

TEST_CASE("doubling the downstream extent leaves K integrals in place") {
  ScenarioParams p = default_params();
  GridSpec longer = default_grid();
  longer.x_max_um = 900.0;
  ScalarField extended = solve_source_field(p, longer);

  for (Position pos :
       {Position{4.0, 10.0}, Position{4.0, 50.0}, Position{3.0, 100.0}, Position{1.0, 200.0},
        Position{0.0, 430.0}}) {
    double base = expected_counts(default_field(), pos, p);
    double wide = expected_counts(extended, pos, p);
    CHECK(std::abs(wide - base) <= 0.01 * std::max(base, 1e-12));
  }
}

TEST_CASE("detection hazard reduces correctly at low thresholds") {
  ScenarioParams p = default_params();

  p.count_threshold = 1;
  double plain = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                              0.3 + p.background_concentration_per_um3);
  CHECK(detection_hazard(0.3, 0.0, p) == plain);  // threshold one is the raw capture rate

  // threshold two collapses to rate * mu / (1 + mu)
  p.count_threshold = 2;
  for (double source_counts : {0.0, 0.02, 0.4, 3.0}) {
    double mu = source_counts + background_counts(p);
    double rate = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                               p.background_concentration_per_um3);
    CHECK(detection_hazard(0.0, source_counts, p) ==
          doctest::Approx(rate * mu / (1.0 + mu)).epsilon(1e-13));
  }

  // and against the explicit pmf form at a higher threshold
  p.count_threshold = 7;
  double mu = 2.5 + background_counts(p);
  double below = 0.0;
  for (int n = 0; n < 7; ++n) below += poisson_pmf(mu, n);
  double rate = capture_rate(p.chem_diffusion_um2_s, p.robot_radius_um,
                             1.1 + p.background_concentration_per_um3);
  CHECK(detection_hazard(1.1, 2.5, p) ==
        doctest::Approx(rate * poisson_pmf(mu, 6) / below).epsilon(1e-12));
}

TEST_CASE("detection hazard never rises with a stiffer threshold") {
  ScenarioParams p = default_params();
  for (double c_here : {0.0, 0.05, 1.8}) {
    for (double k_source : {0.0, 0.5, 8.0, 22.6}) {
      double prev = 0.0;
      for (int e = 40; e >= 1; --e) {
        p.count_threshold = e;
        double h = detection_hazard(c_here, k_source, p);
        CHECK(h >= prev);
        prev = h;
      }
    }
  }
}

TEST_CASE("hazard vanishes when the window cannot fill") {
  ScenarioParams p = default_params();
  p.background_concentration_per_um3 = 0.0;
  p.count_threshold = 2;
  CHECK(detection_hazard(0.0, 0.0, p) == 0.0);  // mean zero, threshold two
  p.count_threshold = 1;
  CHECK(detection_hazard(0.0, 0.0, p) == 0.0);  // no molecules at all

  // tiny mean with a big threshold underflows gracefully to zero
  p = default_params();
  p.count_threshold = 200;
  CHECK(detection_hazard(0.0, 1e-280, p) >= 0.0);
  CHECK(detection_hazard(0.0, 1e-280, p) < 1e-30);
}

TEST_CASE("count model bundles the window statistics") {
  ScenarioParams p = default_params();
  CountModel m = count_model_at(default_field(), {4.0, 20.0}, p);
  CHECK(m.background_counts == doctest::Approx(background_counts(p)));
  CHECK(m.measure_time_s == p.measure_time_s);
  CHECK(m.threshold == p.count_threshold);
  CHECK(m.source_counts == doctest::Approx(expected_counts(default_field(), {4.0, 20.0}, p)));
  CHECK(m.source_counts > 1.0);  // riding the plume past the source piles up counts
}
