#ifndef MSENSE_HYDRO_HPP
#define MSENSE_HYDRO_HPP

#include "msense/params.hpp"

namespace msense {

// Cylindrical coordinates of a robot center inside the vessel, axis at r = 0.
struct Position {
  double r_um = 0.0;
  double x_um = 0.0;
};

/// Reynolds number for an object of the given size moving at the given speed.
double reynolds_number(double size_um, double speed_um_s, double density_g_cm3,
                       double viscosity_g_cm_s);

/// Parabolic axial speed at radius r; throws std::domain_error outside [0, R].
double velocity_profile(double r_um, const ScenarioParams& p);

/// Stokes drag on a sphere, in newtons.
double stokes_drag_newtons(double radius_um, double speed_um_s, double viscosity_g_cm_s);

/// Root-mean-square 3-D Brownian displacement after time t, in um.
double brownian_rms_um(double diffusion_um2_s, double time_s);

/// Position a passively carried robot occupied tau seconds ago (tau > 0 looks
/// into the past, tau < 0 into the future). Radius never changes.
Position advect(const Position& pos, double tau_s, const ScenarioParams& p);

}  // namespace msense

#endif
