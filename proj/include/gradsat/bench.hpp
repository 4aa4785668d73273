#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gradsat/ir.hpp"

namespace gradsat {

// Physics and task constants for the benchmark generators. Values can be
// overridden from a JSON file; the defaults here and configs/physics.json
// ship identical numbers.
struct ThermoPhys {
  double t_env = 15.0;
  double band_lo = 18.0;
  double band_hi = 20.0;
  double t_init = 19.0;
  double cool_factor = 2.0;  // full-band cooling takes cool_factor * dwell
  double heat_factor = 2.0;  // full-band heating takes about heat_factor * dwell
  double ramp_time = 4.0;    // seconds for the heater element to swing 0 <-> 1
  int warmup_steps = 5;

  // Loss / power coefficients derived so the plant time scales track the
  // dwell requirement at any benchmark size.
  double loss(double dwell) const {
    return std::log((band_hi - t_env) / (band_lo - t_env)) / (cool_factor * dwell);
  }
  double power(double dwell) const {
    return (band_hi - band_lo) / (heat_factor * dwell) +
           loss(dwell) * (0.5 * (band_lo + band_hi) - t_env);
  }
  double ramp_rate() const { return 1.0 / ramp_time; }
};

struct CarPhys {
  double start_x = 0.0, start_y = 0.0;
  double obs_x0 = 1.5, obs_x1 = 3.2, obs_y0 = -0.5, obs_y1 = 0.8;
  double obs_speed = 0.0;  // obstacle x-interval drifts by obs_speed * t
  double road_y_lo = -0.2, road_y_hi = 1.2;
  double x_lo = -0.5, x_hi = 6.0;
  double goal_x = 4.4, goal_y = 1.0, goal_y_tol = 0.1;
  double th_lo = 0.0, th_hi = 5.0, th4_hi = 1.5;
  double u_max = 2.0;
};

struct QuadPhys {
  double mass = 1.0, gravity = 9.8, k_ang = 5.0;
  double x0 = 0.0, y0 = 2.0;
  double gain_lo = -10.0, gain_hi = 10.0;
  double target_lo = -5.0, target_hi = 5.0;
  double land_tol = 0.1, land_vtol = 0.5, floor_y = -0.05;
  double obs_x0 = 1.0, obs_x1 = 2.0, obs_clear_y = 1.0;
  double goal_x = 3.0, cruise_tol = 0.5;
};

struct PhysicsConfig {
  ThermoPhys thermo;
  CarPhys car;
  QuadPhys quad;

  static PhysicsConfig load(const std::string& path);  // JSON, partial overrides allowed
  std::string dump() const;
};

struct BenchInfo {
  Program program;
  // Per-step probe points into the program DAG, evaluated for trajectory
  // export and for checking the encoding against the plain simulators.
  std::vector<std::string> columns;
  std::vector<std::vector<NodeId>> trace;  // trace[k][c] pairs with columns[c]
  double dt = 0.0;
};

BenchInfo gen_staircase();
BenchInfo gen_thermostat(int steps, double dt, double dwell, const PhysicsConfig& phys);
BenchInfo gen_pointcar(int steps, double dt, const PhysicsConfig& phys);
BenchInfo gen_quad(int steps, double dt, const std::string& task, const PhysicsConfig& phys);

// Dispatcher for the CLI: name in {staircase, thermostat, pointcar, quad}.
BenchInfo make_bench(const std::string& name, int steps, double dt, double dwell,
                     const std::string& task, const PhysicsConfig& phys);

// RFC-4180 CSV of the probe trajectory under a concrete assignment.
std::string trajectory_csv(const BenchInfo& bench, const Assignment& sigma);

// ---------------------------------------------------------------------------
// Independent simulators: straight-line floating-point re-implementations of
// the benchmark dynamics with plain control flow. Used as oracles for the
// generated encodings and for end-to-end validation of solutions.

struct ThermoSim {
  bool band_ok = true;
  bool dwell_ok = true;
  double min_T = 0.0, max_T = 0.0;
  std::vector<double> T, h, u, age;  // state after each step
};
ThermoSim sim_thermostat(int steps, double dt, double dwell, const ThermoPhys& ph, double x_on,
                         double x_off);

struct CarParams {
  double th1 = 0, th2 = 0, th3 = 0, th4 = 0;
  double u1 = 0, u2 = 0, u3 = 0;
  bool y1 = false, y2 = false;
};
struct CarSim {
  bool collision_free = true;
  bool on_road = true;
  bool goal_ok = false;
  std::vector<double> x, y;
  std::vector<int> mode;  // 1, 2, 3
};
CarSim sim_pointcar(int steps, double dt, const CarPhys& ph, const CarParams& cp);

struct QuadParams {
  double s1 = 0, s2 = 0;
  // per mode: target altitude Ym, gains Py, Dy, target x Xm, gains Px, Pa, Da
  double Ym[3] = {0, 0, 0}, Py[3] = {0, 0, 0}, Dy[3] = {0, 0, 0};
  double Xm[3] = {0, 0, 0}, Px[3] = {0, 0, 0}, Pa[3] = {0, 0, 0}, Da[3] = {0, 0, 0};
};
struct QuadSim {
  bool task_ok = false;
  std::vector<double> x, y, dy, ang;
};
QuadSim sim_quad(int steps, double dt, const std::string& task, const QuadPhys& ph,
                 const QuadParams& qp);

}  // namespace gradsat
