#include "msense/chemfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace msense {

namespace {

constexpr double kPi = std::numbers::pi;

// number of equal cells of width h tiling an extent, or -1 if it does not tile
int tiled_cells(double extent, double h) {
  double n = extent / h;
  double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, n)) return -1;
  return static_cast<int>(r);
}

// fraction of the axial cell j covered by the emitting segment [0, L_source]
double source_overlap(const GridSpec& g, int j, double source_length) {
  double lo = g.x_min_um + j * g.dx_um;
  double hi = lo + g.dx_um;
  double cov = std::min(hi, source_length) - std::max(lo, 0.0);
  return std::max(cov, 0.0) / g.dx_um;
}

struct Stencil {
  // per-radius coefficients, all non-negative (molecule/s per unit concentration)
  std::vector<double> aS, aN;      // radial couplings to i-1, i+1
  std::vector<double> adv, diff_x; // axial advective and diffusive face factors
  std::vector<double> area_x;      // annular cross section of row i
  double wall_area = 0.0;          // emitting face area per axial cell
};

Stencil make_stencil(const ScenarioParams& p, const GridSpec& g, int nr) {
  Stencil st;
  st.aS.resize(nr);
  st.aN.resize(nr);
  st.adv.resize(nr);
  st.diff_x.resize(nr);
  st.area_x.resize(nr);
  double D = p.chem_diffusion_um2_s;
  for (int i = 0; i < nr; ++i) {
    double r_in = i * g.dr_um;
    double r_out = (i + 1) * g.dr_um;
    double r_c = (i + 0.5) * g.dr_um;
    st.area_x[i] = 2.0 * kPi * r_c * g.dr_um;
    st.aS[i] = D * 2.0 * kPi * r_in * g.dx_um / g.dr_um;   // vanishes on the axis
    st.aN[i] = D * 2.0 * kPi * r_out * g.dx_um / g.dr_um;
    st.adv[i] = velocity_profile(r_c, p) * st.area_x[i];
    st.diff_x[i] = D * st.area_x[i] / g.dx_um;
  }
  st.aN[nr - 1] = 0.0;  // wall face carries the prescribed flux instead
  st.wall_area = 2.0 * kPi * p.vessel_radius_um * g.dx_um;
  return st;
}

double diagonal(const Stencil& st, int i, int j, int nx) {
  double d = st.aS[i] + st.aN[i] + st.adv[i];          // radial + advective outflow
  d += (j > 0) ? st.diff_x[i] : 2.0 * st.diff_x[i];    // inflow Dirichlet sits half a cell away
  if (j < nx - 1) d += st.diff_x[i];                   // outflow face has no diffusive gradient
  return d;
}

}  // namespace

ScalarField solve_source_field(const ScenarioParams& p, const GridSpec& g) {
  if (auto bad = validate(p); !bad.empty())
    throw std::invalid_argument("solve_source_field: " + bad.front());
  if (g.dr_um <= 0 || g.dx_um <= 0) throw std::invalid_argument("grid spacings must be positive");
  if (g.dr_um > p.vessel_radius_um / 10.0 + 1e-12)
    throw std::invalid_argument("grid too coarse: dr exceeds R/10");
  if (!(g.x_min_um < 0.0 && p.source_length_um < g.x_max_um))
    throw std::invalid_argument("source segment must lie strictly inside (x_min, x_max)");
  if (g.tolerance <= 0) throw std::invalid_argument("tolerance must be positive");
  if (g.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");

  int nr = tiled_cells(p.vessel_radius_um, g.dr_um);
  int nx = tiled_cells(g.x_max_um - g.x_min_um, g.dx_um);
  if (nr < 0) throw std::invalid_argument("dr does not tile the vessel radius");
  if (nx < 0) throw std::invalid_argument("dx does not tile the axial extent");

  ScalarField f;
  f.grid = g;
  f.nr = nr;
  f.nx = nx;
  f.values.assign(static_cast<size_t>(nr) * nx, 0.0);

  Stencil st = make_stencil(p, g, nr);

  // wall emission per axial cell (row nr-1 only)
  std::vector<double> b_wall(nx);
  double b_norm2 = 0.0;
  for (int j = 0; j < nx; ++j) {
    b_wall[j] = p.source_flux_per_um2_s * source_overlap(g, j, p.source_length_um) * st.wall_area;
    b_norm2 += b_wall[j] * b_wall[j];
  }
  double b_norm = std::sqrt(b_norm2);
  if (b_norm == 0.0) return f;  // nothing emitted, zero field is exact

  auto& c = f.values;
  auto idx = [nx](int i, int j) { return static_cast<size_t>(i) * nx + j; };

  // cell imbalance: emission + inflows - outflows, zero at the solution
  auto residual_at = [&](int i, int j) {
    double r = (i == nr - 1) ? b_wall[j] : 0.0;
    r -= diagonal(st, i, j, nx) * c[idx(i, j)];
    if (i > 0) r += st.aS[i] * c[idx(i - 1, j)];
    if (i < nr - 1) r += st.aN[i] * c[idx(i + 1, j)];
    if (j > 0) r += (st.adv[i] + st.diff_x[i]) * c[idx(i, j - 1)];
    if (j < nx - 1) r += st.diff_x[i] * c[idx(i, j + 1)];
    return r;
  };

  // line relaxation: each axial station solved implicitly in r (Thomas),
  // marching downstream so advection converges in a single pass
  std::vector<double> low(nr), diag(nr), up(nr), rhs(nr);
  for (int sweep = 1; sweep <= g.max_sweeps; ++sweep) {
    for (int j = 0; j < nx; ++j) {
      for (int i = 0; i < nr; ++i) {
        low[i] = -st.aS[i];
        up[i] = -st.aN[i];
        diag[i] = diagonal(st, i, j, nx);
        rhs[i] = (i == nr - 1) ? b_wall[j] : 0.0;
        if (j > 0) rhs[i] += (st.adv[i] + st.diff_x[i]) * c[idx(i, j - 1)];
        if (j < nx - 1) rhs[i] += st.diff_x[i] * c[idx(i, j + 1)];
      }
      for (int i = 1; i < nr; ++i) {  // forward elimination
        double w = low[i] / diag[i - 1];
        diag[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
      c[idx(nr - 1, j)] = rhs[nr - 1] / diag[nr - 1];
      for (int i = nr - 2; i >= 0; --i)
        c[idx(i, j)] = (rhs[i] + st.aN[i] * c[idx(i + 1, j)]) / diag[i];
    }

    double r_norm2 = 0.0;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nx; ++j) {
        double r = residual_at(i, j);
        r_norm2 += r * r;
      }
    if (std::sqrt(r_norm2) <= g.tolerance * b_norm) return f;
  }
  throw SolveError("field solve: residual above tolerance after " +
                   std::to_string(g.max_sweeps) + " sweeps");
}

namespace {

double bilinear(const ScalarField& f, Position pos) {
  // fractional node coordinates, clamped so boundary margins extend the edge node
  double u = std::clamp(pos.r_um / f.grid.dr_um - 0.5, 0.0, static_cast<double>(f.nr - 1));
  double w = std::clamp((pos.x_um - f.grid.x_min_um) / f.grid.dx_um - 0.5, 0.0,
                        static_cast<double>(f.nx - 1));
  int i0 = std::min(static_cast<int>(u), std::max(f.nr - 2, 0));
  int j0 = std::min(static_cast<int>(w), std::max(f.nx - 2, 0));
  int i1 = std::min(i0 + 1, f.nr - 1);
  int j1 = std::min(j0 + 1, f.nx - 1);
  double fu = u - i0;
  double fw = w - j0;
  return (1 - fu) * ((1 - fw) * f.at(i0, j0) + fw * f.at(i0, j1)) +
         fu * ((1 - fw) * f.at(i1, j0) + fw * f.at(i1, j1));
}

}  // namespace

double concentration_at(const ScalarField& f, Position pos, const ScenarioParams& p,
                        bool with_background) {
  double R = f.nr * f.grid.dr_um;
  if (pos.r_um < 0.0 || pos.r_um > R || pos.x_um < f.grid.x_min_um || pos.x_um > f.grid.x_max_um)
    throw std::domain_error("concentration_at: position outside the solved grid");
  double v = bilinear(f, pos);
  return with_background ? v + p.background_concentration_per_um3 : v;
}

double source_concentration_or_zero(const ScalarField& f, Position pos) {
  if (pos.x_um < f.grid.x_min_um || pos.x_um > f.grid.x_max_um) return 0.0;
  if (pos.r_um < 0.0 || pos.r_um > f.nr * f.grid.dr_um)
    throw std::domain_error("source_concentration_or_zero: radius outside the vessel");
  return bilinear(f, pos);
}

double mass_balance_residual(const ScalarField& f, const ScenarioParams& p) {
  double emission = p.source_production_per_s();
  if (emission == 0.0) return 0.0;

  Stencil st = make_stencil(p, f.grid, f.nr);
  double out = 0.0;
  for (int i = 0; i < f.nr; ++i) {
    out += st.adv[i] * f.at(i, f.nx - 1);           // advected through x_max
    out += 2.0 * st.diff_x[i] * f.at(i, 0);         // diffusive leak through x_min
  }
  return std::abs(out - emission) / emission;
}

double peak_wall_concentration(const ScalarField& f, const ScenarioParams& p) {
  double peak = 0.0;
  double D = p.chem_diffusion_um2_s;
  for (int j = 0; j < f.nx; ++j) {
    double flux = p.source_flux_per_um2_s * source_overlap(f.grid, j, p.source_length_um);
    if (flux <= 0.0) continue;
    double wall = f.at(f.nr - 1, j) + 0.5 * f.grid.dr_um * flux / D;
    peak = std::max(peak, wall);
  }
  return peak;
}

std::vector<std::uint8_t> below_background_mask(const ScalarField& f, const ScenarioParams& p) {
  std::vector<std::uint8_t> mask(f.values.size());
  for (size_t n = 0; n < f.values.size(); ++n)
    mask[n] = f.values[n] < p.background_concentration_per_um3 ? 1 : 0;
  return mask;
}

}  // namespace msense
