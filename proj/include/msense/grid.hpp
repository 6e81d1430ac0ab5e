#ifndef MSENSE_GRID_HPP
#define MSENSE_GRID_HPP

namespace msense {

// Discretization of the axisymmetric (r, x) solver domain. Radial cells span
// [0, vessel_radius]; axial cells span [x_min_um, x_max_um] with the source
// segment starting at x = 0. Node values live at cell centers.
struct GridSpec {
  double dr_um = 0.25;       // radial spacing, must divide the vessel radius
  double dx_um = 1.0;        // axial spacing, must divide the axial extent
  double x_min_um = -50.0;   // upstream edge, required < 0
  double x_max_um = 450.0;   // downstream edge, required > source length
  double tolerance = 1e-8;   // relative residual target for the solve
  int max_sweeps = 50000;    // iteration cap before the solve gives up
};

inline GridSpec default_grid() { return GridSpec{}; }

}  // namespace msense

#endif
