#ifndef MSENSE_PARAMS_HPP
#define MSENSE_PARAMS_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msense/grid.hpp"

namespace msense {

// Scenario description for a chemical source on the wall of a small blood
// vessel being monitored by passive sensing robots carried with the plasma.
//
// Canonical units everywhere: lengths in um, times in s, amounts in
// molecules, temperature in K. Fluid density and viscosity keep their CGS
// bookkeeping units and are converted where needed.
struct ScenarioParams {
  // tissue
  double vessel_density_per_mm3 = 500.0;  // vessels crossing a tissue volume [1/mm^3]
  double tissue_volume_cm3 = 1.0;         // monitored tissue volume [cm^3]

  // vessel and source
  double vessel_radius_um = 5.0;          // vessel radius [um]
  double vessel_length_um = 1000.0;       // vessel length [um]
  double source_length_um = 30.0;         // axial extent of the emitting wall patch [um]
  double source_flux_per_um2_s = 56.0;    // emission per wall area [molecule/(um^2 s)]

  // fluid
  double fluid_density_g_cm3 = 1.0;       // plasma density [g/cm^3]
  double viscosity_g_cm_s = 1e-2;         // plasma viscosity [g/(cm s)]
  double avg_velocity_um_s = 1000.0;      // mean flow speed [um/s]
  double temperature_k = 310.0;           // body temperature [K]

  // robot
  double robot_radius_um = 1.0;           // device radius [um]
  double robot_density_per_mm3 = 200.0;   // circulating device number density [1/mm^3]
  double robot_diffusion_um2_s = 0.076;   // device Brownian diffusion coefficient [um^2/s]

  // chemical
  double chem_diffusion_um2_s = 100.0;            // signal molecule diffusion [um^2/s]
  double source_concentration_per_um3 = 1.8;      // nominal plume concentration at the source [molecule/um^3]
  double background_concentration_per_um3 = 6e-3; // body-wide background [molecule/um^3]

  // control
  double measure_time_s = 0.01;           // counting window per detection decision [s]
  int count_threshold = 10;               // counts within the window that trigger detection

  // mission
  double task_time_s = 1000.0;            // monitoring horizon [s]
  int required_detections = 1;            // detection events demanded within the horizon

  // handy conversions
  double robot_density_per_um3() const { return robot_density_per_mm3 * 1e-9; }
  double vessel_count() const { return vessel_density_per_mm3 * tissue_volume_cm3 * 1e3; }
  double source_area_um2() const;
  double source_production_per_s() const;  // molecules emitted per second by the whole patch
};

ScenarioParams default_params();

// Named rule violations for a parameter set; empty means usable. Messages are
// the rule text, e.g. "viscosity > 0" or "robot_radius < vessel_radius".
std::vector<std::string> validate(const ScenarioParams& p);

struct Scenario {
  ScenarioParams params;
  GridSpec grid;
};

// Raised on malformed config text; line is 1-based.
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_no, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

// Parses the flat sectioned key=value config dialect. Unknown sections or
// keys are errors; missing keys keep their defaults; a repeated key wins with
// its last occurrence. '#' starts a comment anywhere on a line.
Scenario load_config(std::string_view text);

// Inverse of load_config: every section and key, values printed so that a
// reload reproduces the exact same numbers.
std::string config_text(const Scenario& s);

}  // namespace msense

#endif
