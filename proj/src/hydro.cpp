#include "msense/hydro.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace msense {

double reynolds_number(double size_um, double speed_um_s, double density_g_cm3,
                       double viscosity_g_cm_s) {
  // CGS internally: 1 um = 1e-4 cm
  double size_cm = size_um * 1e-4;
  double speed_cm_s = speed_um_s * 1e-4;
  return size_cm * speed_cm_s * density_g_cm3 / viscosity_g_cm_s;
}

double velocity_profile(double r_um, const ScenarioParams& p) {
  double R = p.vessel_radius_um;
  if (r_um < 0.0 || r_um > R) throw std::domain_error("velocity_profile: r outside [0, R]");
  double q = r_um / R;
  return 2.0 * p.avg_velocity_um_s * (1.0 - q * q);
}

double stokes_drag_newtons(double radius_um, double speed_um_s, double viscosity_g_cm_s) {
  // SI: um -> m, g/(cm s) -> Pa s is a factor of 0.1
  double radius_m = radius_um * 1e-6;
  double speed_m_s = speed_um_s * 1e-6;
  double viscosity_pa_s = viscosity_g_cm_s * 0.1;
  return 6.0 * std::numbers::pi * viscosity_pa_s * radius_m * speed_m_s;
}

double brownian_rms_um(double diffusion_um2_s, double time_s) {
  return std::sqrt(6.0 * diffusion_um2_s * time_s);
}

Position advect(const Position& pos, double tau_s, const ScenarioParams& p) {
  return Position{pos.r_um, pos.x_um - velocity_profile(pos.r_um, p) * tau_s};
}

}  // namespace msense
