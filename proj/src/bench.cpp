#include "gradsat/bench.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gradsat {

namespace {

using json = nlohmann::json;

void csv_num(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

PhysicsConfig PhysicsConfig::load(const std::string& path) {
  PhysicsConfig c;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open physics config: " + path);
  json j = json::parse(f);
  if (j.contains("thermostat")) {
    const json& t = j["thermostat"];
    auto& p = c.thermo;
    p.t_env = t.value("t_env", p.t_env);
    p.band_lo = t.value("band_lo", p.band_lo);
    p.band_hi = t.value("band_hi", p.band_hi);
    p.t_init = t.value("t_init", p.t_init);
    p.cool_factor = t.value("cool_factor", p.cool_factor);
    p.heat_factor = t.value("heat_factor", p.heat_factor);
    p.ramp_time = t.value("ramp_time", p.ramp_time);
    p.warmup_steps = t.value("warmup_steps", p.warmup_steps);
  }
  if (j.contains("pointcar")) {
    const json& t = j["pointcar"];
    auto& p = c.car;
    p.start_x = t.value("start_x", p.start_x);
    p.start_y = t.value("start_y", p.start_y);
    p.obs_x0 = t.value("obs_x0", p.obs_x0);
    p.obs_x1 = t.value("obs_x1", p.obs_x1);
    p.obs_y0 = t.value("obs_y0", p.obs_y0);
    p.obs_y1 = t.value("obs_y1", p.obs_y1);
    p.obs_speed = t.value("obs_speed", p.obs_speed);
    p.road_y_lo = t.value("road_y_lo", p.road_y_lo);
    p.road_y_hi = t.value("road_y_hi", p.road_y_hi);
    p.x_lo = t.value("x_lo", p.x_lo);
    p.x_hi = t.value("x_hi", p.x_hi);
    p.goal_x = t.value("goal_x", p.goal_x);
    p.goal_y = t.value("goal_y", p.goal_y);
    p.goal_y_tol = t.value("goal_y_tol", p.goal_y_tol);
    p.th_lo = t.value("th_lo", p.th_lo);
    p.th_hi = t.value("th_hi", p.th_hi);
    p.th4_hi = t.value("th4_hi", p.th4_hi);
    p.u_max = t.value("u_max", p.u_max);
  }
  if (j.contains("quad")) {
    const json& t = j["quad"];
    auto& p = c.quad;
    p.mass = t.value("mass", p.mass);
    p.gravity = t.value("gravity", p.gravity);
    p.k_ang = t.value("k_ang", p.k_ang);
    p.x0 = t.value("x0", p.x0);
    p.y0 = t.value("y0", p.y0);
    p.gain_lo = t.value("gain_lo", p.gain_lo);
    p.gain_hi = t.value("gain_hi", p.gain_hi);
    p.target_lo = t.value("target_lo", p.target_lo);
    p.target_hi = t.value("target_hi", p.target_hi);
    p.land_tol = t.value("land_tol", p.land_tol);
    p.land_vtol = t.value("land_vtol", p.land_vtol);
    p.floor_y = t.value("floor_y", p.floor_y);
    p.obs_x0 = t.value("obs_x0", p.obs_x0);
    p.obs_x1 = t.value("obs_x1", p.obs_x1);
    p.obs_clear_y = t.value("obs_clear_y", p.obs_clear_y);
    p.goal_x = t.value("goal_x", p.goal_x);
    p.cruise_tol = t.value("cruise_tol", p.cruise_tol);
  }
  return c;
}

std::string PhysicsConfig::dump() const {
  json j;
  j["thermostat"] = {{"t_env", thermo.t_env},
                     {"band_lo", thermo.band_lo},
                     {"band_hi", thermo.band_hi},
                     {"t_init", thermo.t_init},
                     {"cool_factor", thermo.cool_factor},
                     {"heat_factor", thermo.heat_factor},
                     {"ramp_time", thermo.ramp_time},
                     {"warmup_steps", thermo.warmup_steps}};
  j["pointcar"] = {{"start_x", car.start_x}, {"start_y", car.start_y},
                   {"obs_x0", car.obs_x0},   {"obs_x1", car.obs_x1},
                   {"obs_y0", car.obs_y0},   {"obs_y1", car.obs_y1},
                   {"obs_speed", car.obs_speed}, {"road_y_lo", car.road_y_lo},
                   {"road_y_hi", car.road_y_hi}, {"x_lo", car.x_lo},
                   {"x_hi", car.x_hi},       {"goal_x", car.goal_x},
                   {"goal_y", car.goal_y},   {"goal_y_tol", car.goal_y_tol},
                   {"th_lo", car.th_lo},     {"th_hi", car.th_hi},
                   {"th4_hi", car.th4_hi},   {"u_max", car.u_max}};
  j["quad"] = {{"mass", quad.mass},       {"gravity", quad.gravity},
               {"k_ang", quad.k_ang},     {"x0", quad.x0},
               {"y0", quad.y0},           {"gain_lo", quad.gain_lo},
               {"gain_hi", quad.gain_hi}, {"target_lo", quad.target_lo},
               {"target_hi", quad.target_hi}, {"land_tol", quad.land_tol},
               {"land_vtol", quad.land_vtol}, {"floor_y", quad.floor_y},
               {"obs_x0", quad.obs_x0},   {"obs_x1", quad.obs_x1},
               {"obs_clear_y", quad.obs_clear_y}, {"goal_x", quad.goal_x},
               {"cruise_tol", quad.cruise_tol}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Staircase: one bounded unknown runs through a chain of guarded rewrites of
// an auxiliary quantity; the final disjunctive requirement is folded into a
// single product predicate. Most of the domain sits in a misleading basin, so
// plain smoothing tends to stall while the coupled loop pins branches.

BenchInfo gen_staircase() {
  ProgramBuilder b;
  std::uint32_t x1 = b.add_real("x1", -20.0, 6.0);
  NodeId x = b.real_var(x1);
  NodeId a = b.sub(x, b.constant(5.0));
  a = b.ite(b.ge0(b.sub(b.constant(4.0), x)), b.sub(b.constant(6.0), x), a);
  a = b.ite(b.ge0(b.sub(b.constant(2.0), x)), b.sub(b.constant(8.0), x), a);
  a = b.ite(b.ge0(b.neg(x)), b.add(b.constant(21.0), x), a);
  b.assert_node(b.ge0(b.mul(a, b.sub(a, b.constant(25.0)))));
  BenchInfo info;
  info.columns = {"a"};
  info.trace.push_back({a});
  info.program = b.finish();
  info.dt = 1.0;
  return info;
}

// ---------------------------------------------------------------------------
// Thermostat: synthesize on/off thresholds for a bang-bang heater with a
// ramping element so the room stays inside the band and every mode switch
// respects the minimum dwell time.

BenchInfo gen_thermostat(int steps, double dt, double dwell, const PhysicsConfig& phys) {
  const ThermoPhys& ph = phys.thermo;
  const double L = ph.loss(dwell);
  const double P = ph.power(dwell);
  ProgramBuilder b;
  NodeId xon = b.real_var(b.add_real("x_on", ph.band_lo, ph.band_hi));
  NodeId xoff = b.real_var(b.add_real("x_off", ph.band_lo, ph.band_hi));

  NodeId c0 = b.constant(0.0);
  NodeId c1 = b.constant(1.0);
  NodeId c2 = b.constant(2.0);
  NodeId chalf = b.constant(0.5);
  NodeId cquarter = b.constant(0.25);
  NodeId cdt = b.constant(dt);
  NodeId cdtramp = b.constant(dt * ph.ramp_rate());
  NodeId cP = b.constant(P);
  NodeId cL = b.constant(L);
  NodeId cTe = b.constant(ph.t_env);
  NodeId cdwell = b.constant(dwell);
  NodeId clo = b.constant(ph.band_lo);
  NodeId chi = b.constant(ph.band_hi);

  NodeId T = b.constant(ph.t_init);
  NodeId u = c0;
  NodeId h = c0;
  NodeId age = cdwell;

  BenchInfo info;
  info.columns = {"T", "h", "u", "age"};
  info.dt = dt;

  for (int k = 0; k < steps; ++k) {
    NodeId heating = b.ge0(b.sub(u, chalf));
    NodeId hit_off = b.ge0(b.sub(T, xoff));
    NodeId hit_on = b.ge0(b.sub(xon, T));
    NodeId u_next = b.ite(heating, b.ite(hit_off, c0, c1), b.ite(hit_on, c1, c0));

    NodeId h_raw = b.add(h, b.mul(cdtramp, b.sub(b.mul(c2, u_next), c1)));
    NodeId h_next = b.ite(b.ge0(b.sub(h_raw, c1)), c1, b.ite(b.ge0(b.neg(h_raw)), c0, h_raw));

    NodeId T_next = b.add(T, b.mul(cdt, b.sub(b.mul(cP, h_next), b.mul(cL, b.sub(T, cTe)))));

    NodeId du = b.sub(u_next, u);
    NodeId switched = b.ge0(b.sub(b.mul(du, du), cquarter));
    NodeId dwell_met = b.ge0(b.sub(age, cdwell));
    b.assert_node(b.bnot(b.band(switched, b.bnot(dwell_met))));
    NodeId age_next = b.ite(switched, c0, b.add(age, cdt));

    if (k + 1 >= ph.warmup_steps) {
      b.assert_node(b.ge0(b.sub(T_next, clo)));
      b.assert_node(b.ge0(b.sub(chi, T_next)));
    }

    info.trace.push_back({T_next, h_next, u_next, age_next});
    T = T_next;
    u = u_next;
    h = h_next;
    age = age_next;
  }
  info.program = b.finish();
  return info;
}

ThermoSim sim_thermostat(int steps, double dt, double dwell, const ThermoPhys& ph, double x_on,
                         double x_off) {
  const double L = ph.loss(dwell);
  const double P = ph.power(dwell);
  ThermoSim out;
  double T = ph.t_init, u = 0.0, h = 0.0, age = dwell;
  out.min_T = T;
  out.max_T = T;
  for (int k = 0; k < steps; ++k) {
    double u_next;
    if (u - 0.5 >= 0.0)
      u_next = T - x_off >= 0.0 ? 0.0 : 1.0;
    else
      u_next = x_on - T >= 0.0 ? 1.0 : 0.0;
    double h_raw = h + dt * ph.ramp_rate() * (2.0 * u_next - 1.0);
    double h_next;
    if (h_raw - 1.0 >= 0.0)
      h_next = 1.0;
    else if (-h_raw >= 0.0)
      h_next = 0.0;
    else
      h_next = h_raw;
    double T_next = T + dt * (P * h_next - L * (T - ph.t_env));
    double du = u_next - u;
    bool switched = du * du - 0.25 >= 0.0;
    if (switched && !(age - dwell >= 0.0)) out.dwell_ok = false;
    double age_next = switched ? 0.0 : age + dt;
    if (k + 1 >= ph.warmup_steps) {
      if (!(T_next >= ph.band_lo && T_next <= ph.band_hi)) out.band_ok = false;
      out.min_T = std::min(out.min_T, T_next);
      out.max_T = std::max(out.max_T, T_next);
    }
    out.T.push_back(T_next);
    out.h.push_back(h_next);
    out.u.push_back(u_next);
    out.age.push_back(age_next);
    T = T_next;
    u = u_next;
    h = h_next;
    age = age_next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Point car: synthesize guard thresholds (with learnable guard orientation)
// and per-mode speeds so the trajectory clears a box obstacle, stays on the
// road, and parks in the goal band. The discrete choices are the guard
// orientations y1, y2.

BenchInfo gen_pointcar(int steps, double dt, const PhysicsConfig& phys) {
  const CarPhys& ph = phys.car;
  ProgramBuilder b;
  NodeId th1 = b.real_var(b.add_real("th1", ph.th_lo, ph.th_hi));
  NodeId th2 = b.real_var(b.add_real("th2", ph.th_lo, ph.th_hi));
  NodeId th3 = b.real_var(b.add_real("th3", ph.th_lo, ph.th_hi));
  NodeId th4 = b.real_var(b.add_real("th4", ph.th_lo, ph.th4_hi));
  NodeId u1 = b.real_var(b.add_real("u1", -ph.u_max, ph.u_max));
  NodeId u2 = b.real_var(b.add_real("u2", -ph.u_max, ph.u_max));
  NodeId u3 = b.real_var(b.add_real("u3", -ph.u_max, ph.u_max));
  std::uint32_t y1 = b.add_bool("y1");
  std::uint32_t y2 = b.add_bool("y2");

  NodeId c0 = b.constant(0.0);
  NodeId cdt = b.constant(dt);
  NodeId x = b.constant(ph.start_x);
  NodeId y = b.constant(ph.start_y);

  BenchInfo info;
  info.columns = {"x", "y", "c1", "c2"};
  info.dt = dt;

  for (int k = 0; k < steps; ++k) {
    NodeId c1n = b.ge0(b.iteh(y1, b.sub(x, th1), b.sub(th2, x)));
    NodeId c2n = b.ge0(b.iteh(y2, b.sub(x, th3), b.sub(th4, y)));
    NodeId vx = b.ite(c1n, u1, b.ite(c2n, c0, u3));
    NodeId vy = b.ite(c1n, c0, b.ite(c2n, u2, c0));
    NodeId xn = b.add(x, b.mul(cdt, vx));
    NodeId yn = b.add(y, b.mul(cdt, vy));

    double t = (k + 1) * dt;
    NodeId ox0 = b.constant(ph.obs_x0 + ph.obs_speed * t);
    NodeId ox1 = b.constant(ph.obs_x1 + ph.obs_speed * t);
    NodeId in_x = b.band(b.ge0(b.sub(xn, ox0)), b.ge0(b.sub(ox1, xn)));
    NodeId in_y = b.band(b.ge0(b.sub(yn, b.constant(ph.obs_y0))),
                         b.ge0(b.sub(b.constant(ph.obs_y1), yn)));
    b.assert_node(b.bnot(b.band(in_x, in_y)));
    b.assert_node(b.ge0(b.sub(yn, b.constant(ph.road_y_lo))));
    b.assert_node(b.ge0(b.sub(b.constant(ph.road_y_hi), yn)));
    b.assert_node(b.ge0(b.sub(xn, b.constant(ph.x_lo))));
    b.assert_node(b.ge0(b.sub(b.constant(ph.x_hi), xn)));

    info.trace.push_back({xn, yn, c1n, c2n});
    x = xn;
    y = yn;
  }
  b.assert_node(b.ge0(b.sub(x, b.constant(ph.goal_x))));
  b.assert_node(b.ge0(b.sub(y, b.constant(ph.goal_y - ph.goal_y_tol))));
  b.assert_node(b.ge0(b.sub(b.constant(ph.goal_y + ph.goal_y_tol), y)));
  info.program = b.finish();
  return info;
}

CarSim sim_pointcar(int steps, double dt, const CarPhys& ph, const CarParams& cp) {
  CarSim out;
  double x = ph.start_x, y = ph.start_y;
  for (int k = 0; k < steps; ++k) {
    bool c1 = (cp.y1 ? x - cp.th1 : cp.th2 - x) >= 0.0;
    bool c2 = (cp.y2 ? x - cp.th3 : cp.th4 - y) >= 0.0;
    double vx, vy;
    int mode;
    if (c1) {
      vx = cp.u1;
      vy = 0.0;
      mode = 1;
    } else if (c2) {
      vx = 0.0;
      vy = cp.u2;
      mode = 2;
    } else {
      vx = cp.u3;
      vy = 0.0;
      mode = 3;
    }
    x = x + dt * vx;
    y = y + dt * vy;
    double t = (k + 1) * dt;
    double ox0 = ph.obs_x0 + ph.obs_speed * t;
    double ox1 = ph.obs_x1 + ph.obs_speed * t;
    if (x - ox0 >= 0.0 && ox1 - x >= 0.0 && y - ph.obs_y0 >= 0.0 && ph.obs_y1 - y >= 0.0)
      out.collision_free = false;
    if (!(y >= ph.road_y_lo && y <= ph.road_y_hi && x >= ph.x_lo && x <= ph.x_hi))
      out.on_road = false;
    out.x.push_back(x);
    out.y.push_back(y);
    out.mode.push_back(mode);
  }
  out.goal_ok = x >= ph.goal_x && y >= ph.goal_y - ph.goal_y_tol && y <= ph.goal_y + ph.goal_y_tol;
  return out;
}

// ---------------------------------------------------------------------------
// Planar hover craft with three sequential control modes. The unknowns are
// the two mode-switch times and per-mode PD gains / setpoints; the dynamics
// run through trigonometric thrust decomposition, so the smoothed system
// exercises sin / cos heavily.

BenchInfo gen_quad(int steps, double dt, const std::string& task, const PhysicsConfig& phys) {
  const QuadPhys& ph = phys.quad;
  const double horizon = steps * dt;
  ProgramBuilder b;
  NodeId s1 = b.real_var(b.add_real("s1", 0.0, horizon));
  NodeId s2 = b.real_var(b.add_real("s2", 0.0, horizon));
  NodeId Ym[3], Py[3], Dy[3], Xm[3], Px[3], Pa[3], Da[3];
  for (int m = 0; m < 3; ++m) {
    std::string s = std::to_string(m);
    Ym[m] = b.real_var(b.add_real("Ym" + s, ph.target_lo, ph.target_hi));
    Py[m] = b.real_var(b.add_real("Py" + s, ph.gain_lo, ph.gain_hi));
    Dy[m] = b.real_var(b.add_real("Dy" + s, ph.gain_lo, ph.gain_hi));
    Xm[m] = b.real_var(b.add_real("Xm" + s, ph.target_lo, ph.target_hi));
    Px[m] = b.real_var(b.add_real("Px" + s, ph.gain_lo, ph.gain_hi));
    Pa[m] = b.real_var(b.add_real("Pa" + s, ph.gain_lo, ph.gain_hi));
    Da[m] = b.real_var(b.add_real("Da" + s, ph.gain_lo, ph.gain_hi));
  }

  NodeId chover = b.constant(ph.mass * ph.gravity);
  NodeId cmg = b.constant(ph.mass * ph.gravity);
  NodeId cinvm = b.constant(1.0 / ph.mass);
  NodeId ckang = b.constant(ph.k_ang);
  NodeId cdt = b.constant(dt);

  NodeId x = b.constant(ph.x0);
  NodeId y = b.constant(ph.y0);
  NodeId dx = b.constant(0.0);
  NodeId dy = b.constant(0.0);
  NodeId ang = b.constant(0.0);
  NodeId dang = b.constant(0.0);

  BenchInfo info;
  info.columns = {"x", "y", "dy", "ang"};
  info.dt = dt;

  for (int k = 0; k < steps; ++k) {
    double t = k * dt;
    NodeId ct = b.constant(t);
    NodeId g1 = b.ge0(b.sub(s1, ct));
    NodeId g2 = b.ge0(b.sub(s2, ct));
    NodeId thrust_m[3], bias_m[3];
    for (int m = 0; m < 3; ++m) {
      thrust_m[m] = b.add(
          chover, b.sub(b.mul(b.sub(Ym[m], y), Py[m]), b.mul(dy, Dy[m])));
      bias_m[m] = b.neg(b.add(b.add(b.mul(ang, Pa[m]), b.mul(dang, Da[m])),
                              b.mul(b.sub(x, Xm[m]), Px[m])));
    }
    NodeId thrust = b.ite(g1, thrust_m[0], b.ite(g2, thrust_m[1], thrust_m[2]));
    NodeId bias = b.ite(g1, bias_m[0], b.ite(g2, bias_m[1], bias_m[2]));

    NodeId ddy = b.mul(b.sub(b.mul(thrust, b.op1(OpKind::Cos, ang)), cmg), cinvm);
    NodeId ddx = b.neg(b.mul(b.mul(thrust, b.op1(OpKind::Sin, ang)), cinvm));
    NodeId dda = b.mul(bias, ckang);

    NodeId dyn = b.add(dy, b.mul(cdt, ddy));
    NodeId yn = b.add(y, b.mul(cdt, dyn));
    NodeId dxn = b.add(dx, b.mul(cdt, ddx));
    NodeId xn = b.add(x, b.mul(cdt, dxn));
    NodeId dangn = b.add(dang, b.mul(cdt, dda));
    NodeId angn = b.add(ang, b.mul(cdt, dangn));

    if (task == "landing") {
      b.assert_node(b.ge0(b.sub(yn, b.constant(ph.floor_y))));
    } else {
      NodeId in_x = b.band(b.ge0(b.sub(xn, b.constant(ph.obs_x0))),
                           b.ge0(b.sub(b.constant(ph.obs_x1), xn)));
      b.assert_node(b.bnot(b.band(in_x, b.ge0(b.sub(b.constant(ph.obs_clear_y), yn)))));
    }

    info.trace.push_back({xn, yn, dyn, angn});
    x = xn;
    y = yn;
    dx = dxn;
    dy = dyn;
    ang = angn;
    dang = dangn;
  }
  if (task == "landing") {
    b.assert_node(b.ge0(b.sub(b.constant(ph.land_tol), y)));
    b.assert_node(b.ge0(b.add(y, b.constant(ph.land_tol))));
    b.assert_node(b.ge0(b.sub(b.constant(ph.land_vtol), dy)));
    b.assert_node(b.ge0(b.add(dy, b.constant(ph.land_vtol))));
  } else {
    b.assert_node(b.ge0(b.sub(x, b.constant(ph.goal_x))));
    b.assert_node(b.ge0(b.sub(b.constant(ph.cruise_tol), b.sub(y, b.constant(ph.y0)))));
    b.assert_node(b.ge0(b.add(b.sub(y, b.constant(ph.y0)), b.constant(ph.cruise_tol))));
  }
  info.program = b.finish();
  return info;
}

QuadSim sim_quad(int steps, double dt, const std::string& task, const QuadPhys& ph,
                 const QuadParams& qp) {
  QuadSim out;
  double x = ph.x0, y = ph.y0, dx = 0.0, dy = 0.0, ang = 0.0, dang = 0.0;
  bool ok = true;
  for (int k = 0; k < steps; ++k) {
    double t = k * dt;
    int m = qp.s1 - t >= 0.0 ? 0 : (qp.s2 - t >= 0.0 ? 1 : 2);
    double thrust = ph.mass * ph.gravity + ((qp.Ym[m] - y) * qp.Py[m] - dy * qp.Dy[m]);
    double bias = -(ang * qp.Pa[m] + dang * qp.Da[m] + (x - qp.Xm[m]) * qp.Px[m]);
    double ddy = (thrust * std::cos(ang) - ph.mass * ph.gravity) / ph.mass;
    double ddx = -(thrust * std::sin(ang)) / ph.mass;
    double dda = bias * ph.k_ang;
    dy = dy + dt * ddy;
    y = y + dt * dy;
    dx = dx + dt * ddx;
    x = x + dt * dx;
    dang = dang + dt * dda;
    ang = ang + dt * dang;
    if (task == "landing") {
      if (!(y >= ph.floor_y)) ok = false;
    } else {
      if (x >= ph.obs_x0 && x <= ph.obs_x1 && y <= ph.obs_clear_y) ok = false;
    }
    out.x.push_back(x);
    out.y.push_back(y);
    out.dy.push_back(dy);
    out.ang.push_back(ang);
  }
  if (task == "landing")
    ok = ok && std::fabs(y) <= ph.land_tol && std::fabs(dy) <= ph.land_vtol;
  else
    ok = ok && x >= ph.goal_x && std::fabs(y - ph.y0) <= ph.cruise_tol;
  out.task_ok = ok;
  return out;
}

// ---------------------------------------------------------------------------

BenchInfo make_bench(const std::string& name, int steps, double dt, double dwell,
                     const std::string& task, const PhysicsConfig& phys) {
  if (name == "staircase") return gen_staircase();
  if (name == "thermostat") return gen_thermostat(steps, dt, dwell, phys);
  if (name == "pointcar") return gen_pointcar(steps, dt, phys);
  if (name == "quad") return gen_quad(steps, dt, task, phys);
  throw std::runtime_error("unknown benchmark '" + name + "'");
}

std::string trajectory_csv(const BenchInfo& bench, const Assignment& sigma) {
  std::string out = "step,t";
  for (const auto& c : bench.columns) {
    out += ',';
    out += c;
  }
  out += "\r\n";
  std::vector<NodeId> roots;
  for (const auto& row : bench.trace)
    for (NodeId n : row) roots.push_back(n);
  std::vector<double> vals = bench.program.eval_many(roots, sigma);
  std::size_t i = 0;
  for (std::size_t k = 0; k < bench.trace.size(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    csv_num(out, (k + 1) * bench.dt);
    for (std::size_t c = 0; c < bench.trace[k].size(); ++c) {
      out += ',';
      csv_num(out, vals[i++]);
    }
    out += "\r\n";
  }
  return out;
}

}  // namespace gradsat
