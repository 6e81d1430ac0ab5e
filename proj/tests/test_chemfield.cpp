#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msense/chemfield.hpp"

using namespace msense;

namespace {

// the default solve backs several cases; do it once per process
const ScalarField& default_field() {
  static ScalarField f = solve_source_field(default_params(), default_grid());
  return f;
}

}  // namespace

TEST_CASE("zero emission gives an identically zero field") {
  ScenarioParams p = default_params();
  p.source_flux_per_um2_s = 0.0;
  ScalarField f = solve_source_field(p, default_grid());
  for (double v : f.values) CHECK(v == 0.0);
  CHECK(mass_balance_residual(f, p) == 0.0);
}

TEST_CASE("default solve is conservative, positive, and near the published peak") {
  const ScalarField& f = default_field();
  ScenarioParams p = default_params();

  CHECK(f.nr == 20);
  CHECK(f.nx == 500);

  for (double v : f.values) CHECK(v >= 0.0);

  double residual = mass_balance_residual(f, p);
  CHECK(residual < 0.02);
  CHECK(residual < 1e-6);  // a converged solve leaves only round-off scale leakage

  double peak = peak_wall_concentration(f, p);
  CHECK(peak > 1.8 * 0.75);
  CHECK(peak < 1.8 * 1.25);
}

TEST_CASE("field responds linearly to the emission flux") {
  ScenarioParams p2 = default_params();
  p2.source_flux_per_um2_s *= 2.0;
  ScalarField doubled = solve_source_field(p2, default_grid());
  const ScalarField& base = default_field();

  double scale = 0.0;
  for (double v : base.values) scale = std::max(scale, v);
  for (size_t n = 0; n < base.values.size(); ++n)
    CHECK(std::abs(doubled.values[n] - 2.0 * base.values[n]) < 1e-6 * scale);
}

TEST_CASE("halving both spacings barely moves the wall peak") {
  ScenarioParams p = default_params();
  GridSpec fine = default_grid();
  fine.dr_um /= 2.0;
  fine.dx_um /= 2.0;
  double coarse_peak = peak_wall_concentration(default_field(), p);
  double fine_peak = peak_wall_concentration(solve_source_field(p, fine), p);
  CHECK(std::abs(fine_peak - coarse_peak) / coarse_peak < 0.05);
}

TEST_CASE("high-concentration contours drift downstream toward the axis") {
  const ScalarField& f = default_field();

  auto argmax_x = [&](int i) {
    int best = 0;
    for (int j = 1; j < f.nx; ++j)
      if (f.at(i, j) > f.at(i, best)) best = j;
    return best;
  };

  // walking from the wall row toward the axis the ridge never moves upstream
  int prev = argmax_x(f.nr - 1);
  for (int i = f.nr - 2; i >= 0; --i) {
    int here = argmax_x(i);
    CHECK(here >= prev);
    prev = here;
  }
  // and it genuinely moves: the axis row peaks well downstream of the wall row
  CHECK(argmax_x(0) > argmax_x(f.nr - 1) + 50);
}

TEST_CASE("interpolation honors nodes, midpoints, and the background flag") {
  const ScalarField& f = default_field();
  ScenarioParams p = default_params();

  // exact at a node
  int i = f.nr - 1, j = 230;
  Position node{f.r_node(i), f.x_node(j)};
  CHECK(concentration_at(f, node, p, false) == doctest::Approx(f.at(i, j)).epsilon(1e-14));

  // arithmetic mean at an axial midpoint between two nodes
  Position mid{f.r_node(i), 0.5 * (f.x_node(j) + f.x_node(j + 1))};
  CHECK(concentration_at(f, mid, p, false) ==
        doctest::Approx(0.5 * (f.at(i, j) + f.at(i, j + 1))).epsilon(1e-12));

  // far upstream the field is empty, the flag restores the body background
  Position upstream{1.0, f.grid.x_min_um};
  CHECK(concentration_at(f, upstream, p, false) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(concentration_at(f, upstream, p, true) ==
        doctest::Approx(p.background_concentration_per_um3).epsilon(1e-9));

  CHECK_THROWS_AS(concentration_at(f, {5.5, 100.0}, p, false), std::domain_error);
  CHECK_THROWS_AS(concentration_at(f, {1.0, f.grid.x_max_um + 1.0}, p, false), std::domain_error);

  // transit-path lookups treat anything beyond the window as clean fluid
  CHECK(source_concentration_or_zero(f, {1.0, f.grid.x_max_um + 1.0}) == 0.0);
  CHECK(source_concentration_or_zero(f, {1.0, f.grid.x_min_um - 100.0}) == 0.0);
  CHECK(source_concentration_or_zero(f, node) == doctest::Approx(f.at(i, j)).epsilon(1e-14));
}

TEST_CASE("mask separates the plume from clean fluid") {
  const ScalarField& f = default_field();
  ScenarioParams p = default_params();
  auto mask = below_background_mask(f, p);

  auto flag = [&](int i, int j) { return mask[static_cast<size_t>(i) * f.nx + j]; };

  // node hugging the middle of the emitting segment: far above background
  int j_source = static_cast<int>((15.0 - f.grid.x_min_um) / f.grid.dx_um);
  CHECK(flag(f.nr - 1, j_source) == 0);

  // upstream of the source near the axis: essentially clean
  int j_up = static_cast<int>((-10.0 - f.grid.x_min_um) / f.grid.dx_um);
  for (int i = 0; i < 5; ++i) CHECK(flag(i, j_up) == 1);
}

TEST_CASE("unusable grids are rejected up front") {
  ScenarioParams p = default_params();
  GridSpec g = default_grid();

  g.dr_um = 1.0;  // coarser than R/10
  CHECK_THROWS_AS(solve_source_field(p, g), std::invalid_argument);

  g = default_grid();
  g.dr_um = 0.3;  // does not tile R = 5
  CHECK_THROWS_AS(solve_source_field(p, g), std::invalid_argument);

  g = default_grid();
  g.x_min_um = 10.0;  // source segment no longer inside the window
  CHECK_THROWS_AS(solve_source_field(p, g), std::invalid_argument);

  g = default_grid();
  g.x_max_um = 20.0;  // cuts the emitting segment
  CHECK_THROWS_AS(solve_source_field(p, g), std::invalid_argument);

  ScenarioParams bad = p;
  bad.count_threshold = 0;
  CHECK_THROWS_AS(solve_source_field(bad, default_grid()), std::invalid_argument);
}

TEST_CASE("a starved sweep budget raises the non-convergence error") {
  ScenarioParams p = default_params();
  GridSpec g = default_grid();
  g.max_sweeps = 1;
  g.tolerance = 1e-14;
  CHECK_THROWS_AS(solve_source_field(p, g), SolveError);
}
