#include "msense/params.hpp"

#include <cctype>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace msense {

double ScenarioParams::source_area_um2() const {
  return 2.0 * std::numbers::pi * vessel_radius_um * source_length_um;
}

double ScenarioParams::source_production_per_s() const {
  return source_flux_per_um2_s * source_area_um2();
}

ScenarioParams default_params() { return ScenarioParams{}; }

std::vector<std::string> validate(const ScenarioParams& p) {
  std::vector<std::string> bad;
  auto check = [&bad](bool ok, const char* rule) {
    if (!ok) bad.emplace_back(rule);
  };

  check(p.vessel_density_per_mm3 > 0, "vessel_density > 0");
  check(p.tissue_volume_cm3 > 0, "tissue_volume > 0");
  check(p.vessel_radius_um > 0, "vessel_radius > 0");
  check(p.vessel_length_um > 0, "vessel_length > 0");
  check(p.source_length_um > 0, "source_length > 0");
  check(p.source_length_um <= p.vessel_length_um, "source_length <= vessel_length");
  check(p.source_flux_per_um2_s >= 0, "source_flux >= 0");
  check(p.fluid_density_g_cm3 > 0, "fluid_density > 0");
  check(p.viscosity_g_cm_s > 0, "viscosity > 0");
  check(p.avg_velocity_um_s > 0, "avg_velocity > 0");
  check(p.temperature_k > 0, "temperature > 0");
  check(p.robot_radius_um > 0, "robot_radius > 0");
  check(p.robot_radius_um < p.vessel_radius_um, "robot_radius < vessel_radius");
  check(p.robot_density_per_mm3 > 0, "robot_density > 0");
  check(p.robot_diffusion_um2_s > 0, "robot_diffusion > 0");
  check(p.chem_diffusion_um2_s > 0, "chem_diffusion > 0");
  check(p.source_concentration_per_um3 >= 0, "source_concentration >= 0");
  check(p.background_concentration_per_um3 >= 0, "background_concentration >= 0");
  check(p.measure_time_s > 0, "measure_time > 0");
  check(p.count_threshold >= 1, "C_threshold >= 1");
  check(p.task_time_s > 0, "task_time > 0");
  check(p.required_detections >= 1, "required_detections >= 1");
  return bad;
}

namespace {

enum class Kind { Real, Int };

// One config key bound to its storage inside a Scenario. The same table
// drives parsing and serialization so the two cannot drift apart.
struct KeyBinding {
  const char* section;
  const char* key;
  Kind kind;
  double* real = nullptr;
  int* integer = nullptr;
};

std::vector<KeyBinding> bindings(Scenario& s) {
  ScenarioParams& p = s.params;
  GridSpec& g = s.grid;
  return {
      {"tissue", "vessel_density_per_mm3", Kind::Real, &p.vessel_density_per_mm3},
      {"tissue", "volume_cm3", Kind::Real, &p.tissue_volume_cm3},
      {"vessel", "radius_um", Kind::Real, &p.vessel_radius_um},
      {"vessel", "length_um", Kind::Real, &p.vessel_length_um},
      {"vessel", "source_length_um", Kind::Real, &p.source_length_um},
      {"vessel", "source_flux_per_um2_s", Kind::Real, &p.source_flux_per_um2_s},
      {"fluid", "density_g_cm3", Kind::Real, &p.fluid_density_g_cm3},
      {"fluid", "viscosity_g_cm_s", Kind::Real, &p.viscosity_g_cm_s},
      {"fluid", "avg_velocity_um_s", Kind::Real, &p.avg_velocity_um_s},
      {"fluid", "temperature_k", Kind::Real, &p.temperature_k},
      {"robot", "radius_um", Kind::Real, &p.robot_radius_um},
      {"robot", "density_per_mm3", Kind::Real, &p.robot_density_per_mm3},
      {"robot", "diffusion_um2_s", Kind::Real, &p.robot_diffusion_um2_s},
      {"chemical", "diffusion_um2_s", Kind::Real, &p.chem_diffusion_um2_s},
      {"chemical", "source_concentration_per_um3", Kind::Real, &p.source_concentration_per_um3},
      {"chemical", "background_concentration_per_um3", Kind::Real,
       &p.background_concentration_per_um3},
      {"control", "measure_time_s", Kind::Real, &p.measure_time_s},
      {"control", "count_threshold", Kind::Int, nullptr, &p.count_threshold},
      {"mission", "task_time_s", Kind::Real, &p.task_time_s},
      {"mission", "required_detections", Kind::Int, nullptr, &p.required_detections},
      {"numerics", "dr_um", Kind::Real, &g.dr_um},
      {"numerics", "dx_um", Kind::Real, &g.dx_um},
      {"numerics", "x_min_um", Kind::Real, &g.x_min_um},
      {"numerics", "x_max_um", Kind::Real, &g.x_max_um},
      {"numerics", "tolerance", Kind::Real, &g.tolerance},
      {"numerics", "max_sweeps", Kind::Int, nullptr, &g.max_sweeps},
  };
}

std::string_view trim(std::string_view v) {
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
  while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
  return v;
}

bool parse_real(std::string_view v, double& out) {
  std::string buf(v);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && !buf.empty() && std::isfinite(out);
}

bool parse_int(std::string_view v, int& out) {
  std::string buf(v);
  char* end = nullptr;
  long n = std::strtol(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || buf.empty()) return false;
  if (n < INT_MIN || n > INT_MAX) return false;
  out = static_cast<int>(n);
  return true;
}

// Shortest decimal form that parses back to exactly the same double.
std::string round_trip_repr(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

Scenario load_config(std::string_view text) {
  Scenario sc;
  auto table = bindings(sc);

  std::string section;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const auto& b : table) known = known || section == b.section;
      if (!known) throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    if (section.empty()) throw ConfigError(line_no, "key before any [section]");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));

    const KeyBinding* hit = nullptr;
    for (const auto& b : table) {
      if (section == b.section && key == b.key) {
        hit = &b;
        break;
      }
    }
    if (!hit) throw ConfigError(line_no, "unknown key " + key + " in section [" + section + "]");

    bool ok = hit->kind == Kind::Real ? parse_real(value, *hit->real)
                                      : parse_int(value, *hit->integer);
    if (!ok)
      throw ConfigError(line_no, "bad " + std::string(hit->kind == Kind::Real ? "number" : "integer") +
                                     " for " + key + ": '" + std::string(value) + "'");
  }
  return sc;
}

std::string config_text(const Scenario& s) {
  Scenario copy = s;
  auto table = bindings(copy);

  std::ostringstream out;
  std::string section;
  for (const auto& b : table) {
    if (section != b.section) {
      if (!section.empty()) out << "\n";
      section = b.section;
      out << "[" << section << "]\n";
    }
    out << b.key << " = ";
    if (b.kind == Kind::Real)
      out << round_trip_repr(*b.real);
    else
      out << *b.integer;
    out << "\n";
  }
  return out.str();
}

}  // namespace msense
